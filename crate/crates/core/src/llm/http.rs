use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{ChatBackend, ChatRequest, LlmError};

/// Environment variable holding the bearer token.
pub const API_KEY_ENV: &str = "ITINERA_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpConfig {
    pub base_url: String,
    pub model: String,
    pub request_timeout_secs: u64,
    /// Passed through when set.
    pub top_p: Option<f64>,
    pub seed: Option<u64>,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4-turbo".into(),
            request_timeout_secs: 120,
            top_p: None,
            seed: None,
        }
    }
}

/// Client for the common `/chat/completions` wire shape.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    config: HttpConfig,
    token: Option<String>,
}

impl HttpBackend {
    pub fn new(config: HttpConfig, token: Option<String>) -> Result<Self, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.request_timeout_secs))
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        Ok(HttpBackend { client, config, token })
    }

    /// Reads the token from [`API_KEY_ENV`].
    pub fn from_env(config: HttpConfig) -> Result<Self, LlmError> {
        Self::new(config, std::env::var(API_KEY_ENV).ok())
    }

    pub fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'))
    }

    pub fn body(&self, request: &ChatRequest) -> Value {
        let messages: Vec<Value> = request
            .messages
            .iter()
            .map(|m| json!({ "role": m.speaker.as_str(), "content": m.text }))
            .collect();
        let mut body = json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": request.temperature,
        });
        if let Some(p) = self.config.top_p {
            body["top_p"] = json!(p);
        }
        if let Some(s) = self.config.seed {
            body["seed"] = json!(s);
        }
        body
    }
}

fn transport(message: impl Into<String>, retryable: bool) -> LlmError {
    LlmError::Transport { message: message.into(), retryable }
}

impl ChatBackend for HttpBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let mut call = self.client.post(self.endpoint()).json(&self.body(request));
        if let Some(token) = &self.token {
            call = call.bearer_auth(token);
        }
        let response = call.send().map_err(|e| transport(e.to_string(), true))?;
        let status = response.status();
        let text = response.text().map_err(|e| transport(e.to_string(), true))?;
        if !status.is_success() {
            if text.contains("context_length") || text.contains("maximum context") {
                return Err(LlmError::ContextOverflow(text));
            }
            let retryable = status.as_u16() == 429 || status.is_server_error();
            return Err(transport(format!("HTTP {status}: {text}"), retryable));
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| transport(format!("bad body: {e}"), false))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| transport("response has no choices[0].message.content", false))
    }
}
