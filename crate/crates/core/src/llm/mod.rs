//! Chat-completion boundary: request types, the gateway that applies the
//! temperature and retry policy, and the live, replay and recording backends.

mod http;
pub mod prompts;
mod recording;
mod replay;
mod scripted;
pub mod transcript;

use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use http::{HttpBackend, HttpConfig, API_KEY_ENV};
pub use prompts::{render_prompt, PromptContext};
pub use recording::RecordingBackend;
pub use replay::ReplayBackend;
pub use scripted::{plan_text_to_json, AgentScript, ScriptedAgent, ScriptedBackend};
pub use transcript::{read_transcript, write_transcript, TranscriptEntry};

/// Scope used for query-independent calls shared across a corpus.
pub const CORPUS_SCOPE: &str = "corpus";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentRole {
    PathFinder,
    Keypoints,
    Commonsense,
    Thought,
    Tool,
    Description,
    Plan,
    Evaluate,
}

impl AgentRole {
    pub const ALL: [AgentRole; 8] = [
        AgentRole::PathFinder,
        AgentRole::Keypoints,
        AgentRole::Commonsense,
        AgentRole::Thought,
        AgentRole::Tool,
        AgentRole::Description,
        AgentRole::Plan,
        AgentRole::Evaluate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentRole::PathFinder => "PathFinder",
            AgentRole::Keypoints => "Keypoints",
            AgentRole::Commonsense => "Commonsense",
            AgentRole::Thought => "Thought",
            AgentRole::Tool => "Tool",
            AgentRole::Description => "Description",
            AgentRole::Plan => "Plan",
            AgentRole::Evaluate => "Evaluate",
        }
    }
}

impl fmt::Display for AgentRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    System,
    User,
    Assistant,
}

impl Speaker {
    pub fn as_str(self) -> &'static str {
        match self {
            Speaker::System => "system",
            Speaker::User => "user",
            Speaker::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub speaker: Speaker,
    pub text: String,
}

impl Message {
    pub fn system(text: impl Into<String>) -> Self {
        Message { speaker: Speaker::System, text: text.into() }
    }
    pub fn user(text: impl Into<String>) -> Self {
        Message { speaker: Speaker::User, text: text.into() }
    }
    pub fn assistant(text: impl Into<String>) -> Self {
        Message { speaker: Speaker::Assistant, text: text.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    /// Query id, or [`CORPUS_SCOPE`] for shared calls.
    pub scope: String,
    pub role: AgentRole,
    pub messages: Vec<Message>,
    pub temperature: f64,
}

impl ChatRequest {
    pub fn validate(&self) -> Result<(), LlmError> {
        match self.messages.first() {
            None => Err(LlmError::InvalidRequest("no messages".into())),
            Some(m) if m.speaker != Speaker::System => {
                Err(LlmError::InvalidRequest("first message must be a system message".into()))
            }
            _ if !(0.0..=2.0).contains(&self.temperature) => {
                Err(LlmError::InvalidRequest(format!("temperature {} out of range", self.temperature)))
            }
            _ => Ok(()),
        }
    }

    /// Stable hex digest of the rendered request (role, temperature, messages).
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.role.name().as_bytes());
        h.update([0]);
        h.update(format!("{:.3}", self.temperature).as_bytes());
        for m in &self.messages {
            h.update([0x1e]);
            h.update(m.speaker.as_str().as_bytes());
            h.update([0]);
            h.update(m.text.as_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LlmError {
    #[error("transport failure: {message}")]
    Transport { message: String, retryable: bool },
    #[error("context overflow: {0}")]
    ContextOverflow(String),
    #[error("replay exhausted for {role} in scope {scope} after {served} responses")]
    ReplayExhausted { scope: String, role: AgentRole, served: usize },
    #[error("replay digest mismatch for {role} #{seq} in scope {scope}")]
    DigestMismatch { scope: String, role: AgentRole, seq: usize, expected: String, actual: String },
    #[error("empty response from {0}")]
    EmptyResponse(AgentRole),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("prompt for {role} needs {field}")]
    MissingContext { role: AgentRole, field: &'static str },
    #[error("transcript: {0}")]
    Transcript(String),
    #[error("backend configuration: {0}")]
    Config(String),
}

impl LlmError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, LlmError::Transport { retryable: true, .. })
    }
}

pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError>;
}

impl<B: ChatBackend + ?Sized> ChatBackend for Arc<B> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

/// One request as seen by the gateway.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    pub scope: String,
    pub role: AgentRole,
    pub temperature: f64,
    pub digest: String,
    pub attempts: u32,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatewayConfig {
    pub plan_temperature: f64,
    pub max_retries: u32,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        GatewayConfig { plan_temperature: 0.7, max_retries: 2 }
    }
}

pub struct Gateway {
    backend: Arc<dyn ChatBackend>,
    config: GatewayConfig,
    log: Mutex<Vec<RequestRecord>>,
}

impl Gateway {
    pub fn new(backend: Arc<dyn ChatBackend>, config: GatewayConfig) -> Self {
        Gateway { backend, config, log: Mutex::new(Vec::new()) }
    }

    pub fn config(&self) -> GatewayConfig {
        self.config
    }

    pub fn temperature_for(&self, role: AgentRole) -> f64 {
        if role == AgentRole::Plan {
            self.config.plan_temperature
        } else {
            0.0
        }
    }

    /// Sends one request, retrying retryable transport failures.
    pub fn complete(&self, scope: &str, role: AgentRole, messages: Vec<Message>) -> Result<String, LlmError> {
        let request = ChatRequest { scope: scope.to_string(), role, temperature: self.temperature_for(role), messages };
        request.validate()?;
        let digest = request.digest();
        log::debug!("{scope} {role} t={} {}", request.temperature, &digest[..12]);
        let mut attempts = 0;
        let result = loop {
            attempts += 1;
            match self.backend.complete(&request) {
                Err(e) if e.is_retryable() && attempts <= self.config.max_retries => {
                    log::warn!("{scope} {role}: {e}, retrying");
                }
                Ok(text) if text.trim().is_empty() => break Err(LlmError::EmptyResponse(role)),
                other => break other,
            }
        };
        self.log.lock().expect("request log").push(RequestRecord {
            scope: scope.to_string(),
            role,
            temperature: request.temperature,
            digest,
            attempts,
            ok: result.is_ok(),
        });
        result
    }

    pub fn scoped(&self, scope: impl Into<String>) -> Session<'_> {
        Session { gateway: self, scope: scope.into() }
    }

    pub fn request_log(&self) -> Vec<RequestRecord> {
        self.log.lock().expect("request log").clone()
    }

    pub fn request_log_for(&self, scope: &str) -> Vec<RequestRecord> {
        self.request_log().into_iter().filter(|r| r.scope == scope).collect()
    }
}

/// Gateway handle bound to one query.
#[derive(Clone)]
pub struct Session<'g> {
    gateway: &'g Gateway,
    scope: String,
}

impl<'g> Session<'g> {
    pub fn scope(&self) -> &str {
        &self.scope
    }

    pub fn gateway(&self) -> &'g Gateway {
        self.gateway
    }

    pub fn complete(&self, role: AgentRole, messages: Vec<Message>) -> Result<String, LlmError> {
        self.gateway.complete(&self.scope, role, messages)
    }

    pub fn render_and_complete(&self, role: AgentRole, ctx: &PromptContext) -> Result<String, LlmError> {
        self.complete(role, render_prompt(role, ctx)?)
    }
}

#[cfg(test)]
mod tests;
