use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{AgentRole, ChatBackend, ChatRequest, LlmError, CORPUS_SCOPE};
use crate::domain::PlanField;

/// Backend driven by a closure; handy for mocks.
pub struct ScriptedBackend<F>(pub F);

impl<F> ChatBackend for ScriptedBackend<F>
where
    F: Fn(&ChatRequest) -> Result<String, LlmError> + Send + Sync,
{
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        (self.0)(request)
    }
}

/// Canned replies for one query. Each list is consumed in order; the last
/// entry repeats once a list runs out. Evaluate replies are derived from the
/// plan text in the request.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentScript {
    pub routes: Vec<String>,
    pub keypoints: Vec<String>,
    pub thoughts: Vec<String>,
    pub actions: Vec<String>,
    pub plans: Vec<String>,
}

/// Deterministic stand-in for a model, keyed by request scope.
pub struct ScriptedAgent {
    scripts: HashMap<String, AgentScript>,
    guides: String,
    cursors: Mutex<HashMap<(String, AgentRole), usize>>,
}

impl ScriptedAgent {
    pub fn new(guides: impl Into<String>) -> Self {
        ScriptedAgent { scripts: HashMap::new(), guides: guides.into(), cursors: Mutex::new(HashMap::new()) }
    }

    pub fn with_script(mut self, scope: impl Into<String>, script: AgentScript) -> Self {
        self.scripts.insert(scope.into(), script);
        self
    }

    fn next<'a>(&self, scope: &str, role: AgentRole, list: &'a [String]) -> Result<&'a str, LlmError> {
        let mut cursors = self.cursors.lock().expect("cursor lock");
        let i = cursors.entry((scope.to_string(), role)).or_insert(0);
        let out = list.get(*i).or(list.last()).ok_or(LlmError::EmptyResponse(role))?;
        *i += 1;
        Ok(out)
    }
}

/// JSON object for a plain-text day plan ("Label: value" lines).
pub fn plan_text_to_json(text: &str, day: u32) -> String {
    let mut map = Map::new();
    map.insert("day".into(), Value::from(day));
    for field in PlanField::ALL {
        let prefix = format!("{}:", field.label());
        let value = text
            .lines()
            .map(str::trim)
            .find_map(|l| l.strip_prefix(prefix.as_str()))
            .map(|v| v.trim().to_string())
            .unwrap_or_else(|| "-".into());
        map.insert(field.key().into(), Value::String(value));
    }
    Value::Object(map).to_string()
}

fn user_text(request: &ChatRequest) -> &str {
    request.messages.last().map(|m| m.text.as_str()).unwrap_or("")
}

impl ChatBackend for ScriptedAgent {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let role = request.role;
        if role == AgentRole::Commonsense {
            return Ok(self.guides.clone());
        }
        let scope = request.scope.as_str();
        let script = self
            .scripts
            .get(scope)
            .filter(|_| scope != CORPUS_SCOPE)
            .ok_or_else(|| LlmError::Transport { message: format!("no script for {scope}"), retryable: false })?;
        let text = user_text(request);
        let out = match role {
            AgentRole::PathFinder => self.next(scope, role, &script.routes)?.to_string(),
            AgentRole::Keypoints => self.next(scope, role, &script.keypoints)?.to_string(),
            AgentRole::Thought => self.next(scope, role, &script.thoughts)?.to_string(),
            AgentRole::Tool => self.next(scope, role, &script.actions)?.to_string(),
            AgentRole::Plan => self.next(scope, role, &script.plans)?.to_string(),
            AgentRole::Description => {
                let call = text.lines().next().and_then(|l| l.strip_prefix("Call: ")).unwrap_or("the search");
                format!("Results of {call}")
            }
            AgentRole::Evaluate => {
                let (head, body) = text.split_once('\n').unwrap_or((text, ""));
                let day = head
                    .trim_start_matches("Day ")
                    .split_whitespace()
                    .next()
                    .and_then(|d| d.parse().ok())
                    .unwrap_or(1);
                plan_text_to_json(body, day)
            }
            AgentRole::Commonsense => unreachable!(),
        };
        Ok(out)
    }
}
