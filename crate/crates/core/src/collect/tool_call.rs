use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ToolName {
    FlightSearch,
    DistanceMatrix,
    AccommodationSearch,
    RestaurantSearch,
    AttractionSearch,
    CitySearch,
    DailyPlanner,
}

impl ToolName {
    pub const ALL: [ToolName; 7] = [
        ToolName::FlightSearch,
        ToolName::DistanceMatrix,
        ToolName::AccommodationSearch,
        ToolName::RestaurantSearch,
        ToolName::AttractionSearch,
        ToolName::CitySearch,
        ToolName::DailyPlanner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ToolName::FlightSearch => "FlightSearch",
            ToolName::DistanceMatrix => "DistanceMatrix",
            ToolName::AccommodationSearch => "AccommodationSearch",
            ToolName::RestaurantSearch => "RestaurantSearch",
            ToolName::AttractionSearch => "AttractionSearch",
            ToolName::CitySearch => "CitySearch",
            ToolName::DailyPlanner => "DailyPlanner",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            ToolName::FlightSearch | ToolName::DistanceMatrix => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for ToolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ToolName {
    type Err = ToolCallError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ToolName::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ToolCallError::UnknownTool(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ToolCall {
    pub name: ToolName,
    pub args: Vec<String>,
}

impl ToolCall {
    pub fn new(name: ToolName, args: &[&str]) -> Self {
        ToolCall { name, args: args.iter().map(|a| a.to_string()).collect() }
    }

    /// Form used for repeated-call detection: case and inner whitespace folded.
    pub fn normalized(&self) -> (ToolName, Vec<String>) {
        let fold = |a: &String| a.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
        (self.name, self.args.iter().map(fold).collect())
    }
}

impl fmt::Display for ToolCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToolCallError {
    #[error("no tool call of the form Tool[arguments] found")]
    NotFound,
    #[error("unknown tool {0}")]
    UnknownTool(String),
    #[error("{tool} takes {expected} argument(s), got {found}")]
    Arity { tool: ToolName, expected: usize, found: usize },
}

fn action_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)action\s*\d*\s*:").unwrap())
}

fn name_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"([A-Za-z_]+)\s*\[").unwrap())
}

/// Extracts `Tool[args]`, tolerating prose before an "Action N:" marker.
pub fn parse_tool_call(text: &str) -> Result<ToolCall, ToolCallError> {
    let start = action_re().find_iter(text).last().map_or(0, |m| m.end());
    let rest = &text[start..];
    let cap = name_re().captures(rest).ok_or(ToolCallError::NotFound)?;
    let open = cap.get(0).expect("whole match").end();
    let mut depth = 1usize;
    let mut close = None;
    for (i, ch) in rest[open..].char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth == 0 {
                    close = Some(open + i);
                    break;
                }
            }
            _ => {}
        }
    }
    let close = close.ok_or(ToolCallError::NotFound)?;
    let name: ToolName = cap[1].parse()?;
    let inner = rest[open..close].trim();
    let args: Vec<String> = if name == ToolName::DailyPlanner {
        vec![inner.to_string()]
    } else {
        inner.split(',').map(|a| a.trim().to_string()).collect()
    };
    let found = args.iter().filter(|a| !a.is_empty()).count();
    if found != name.arity() || args.len() != name.arity() {
        return Err(ToolCallError::Arity { tool: name, expected: name.arity(), found });
    }
    Ok(ToolCall { name, args })
}
