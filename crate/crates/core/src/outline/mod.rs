//! Phase one: route, keypoints and general guides, with transportation
//! feasibility feedback to the route planner.

mod feasibility;
mod route;

use std::sync::{Arc, Mutex, OnceLock};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use feasibility::{
    evaluate_transportation, leg_options, FeasibilityVerdict, LegStatus, LegVerdict, TransportOption,
};
pub use route::{parse_route, validate_route, DayEntry, DayKind, RouteError, RouteSkeleton};

use crate::domain::{prose_date, DestinationScope, TravelQuery};
use crate::llm::{AgentRole, Gateway, LlmError, PromptContext, Session, CORPUS_SCOPE};
use crate::sandbox::TravelDatabase;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outline {
    pub route: RouteSkeleton,
    pub keypoints: Vec<String>,
    pub guides: Arc<Vec<String>>,
    pub transport_notes: Vec<String>,
}

impl Outline {
    /// Route lines, numbered keypoints, then numbered guides.
    pub fn render_text(&self) -> String {
        let mut out = self.route.to_string();
        out.push_str("\n\n");
        for (i, k) in self.keypoints.iter().enumerate() {
            out.push_str(&format!("{}.{k}\n", i + 1));
        }
        out.push('\n');
        for (i, g) in self.guides.iter().enumerate() {
            out.push_str(&format!("{}. {g}\n", i + 1));
        }
        out.trim_end().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OutlineError {
    #[error(transparent)]
    Backend(#[from] LlmError),
    #[error("no feasible route after {attempts} attempts: {feedback}")]
    RetriesExhausted { attempts: u32, feedback: String },
    #[error("keypoints: {0}")]
    Keypoints(String),
    #[error("guides: {0}")]
    Guides(String),
}

fn bullet_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*(?:\d+\s*[.):]|[-*\u{2022}])\s*").unwrap())
}

/// Items of a numbered or bulleted list; plain lines when nothing is numbered.
pub fn parse_list(text: &str) -> Vec<String> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let numbered: Vec<String> = lines
        .iter()
        .filter(|l| bullet_re().is_match(l))
        .map(|l| bullet_re().replace(l, "").trim().to_string())
        .filter(|l| !l.is_empty())
        .collect();
    if numbered.is_empty() {
        lines.into_iter().map(str::to_string).collect()
    } else {
        numbered
    }
}

/// Facts the route planner needs besides the query text.
pub fn route_facts(query: &TravelQuery, db: &TravelDatabase) -> String {
    let mut out = format!(
        "Origin: {}\nDates: {} to {} ({} days)\nDestination: {}",
        query.origin_city,
        prose_date(query.start_date),
        prose_date(query.end_date),
        query.duration_days,
        query.destination
    );
    if let DestinationScope::State { state, .. } = &query.destination {
        out.push_str(&format!("\nCandidate cities: {}", db.city_search(state).join(", ")));
    }
    out
}

/// One PathFinder call, parsed and checked against the query contract.
pub fn generate_route(
    session: &Session,
    query: &TravelQuery,
    db: &TravelDatabase,
    feedback: Option<&str>,
) -> Result<Result<RouteSkeleton, RouteError>, LlmError> {
    let facts = route_facts(query, db);
    let ctx = PromptContext { query_text: Some(&query.text), route_facts: Some(&facts), feedback, ..Default::default() };
    let text = session.render_and_complete(AgentRole::PathFinder, &ctx)?;
    Ok(parse_route(&text, db).and_then(|r| validate_route(&r, query, db).map(|_| r)))
}

/// Which of "budget" and "dates" the keypoints fail to mention.
pub fn keypoint_gaps(keypoints: &[String], query: &TravelQuery) -> Vec<&'static str> {
    let text = keypoints.join("\n");
    let mut gaps = Vec::new();
    let amount = query.budget.to_dollar_string();
    let budget_tokens = [amount.trim_start_matches('$').to_string(), query.budget.whole_units().to_string()];
    if !budget_tokens.iter().any(|t| text.contains(t.as_str())) {
        gaps.push("budget");
    }
    let start = query.start_date;
    let prose = prose_date(start);
    let month_day = prose.split(',').next().unwrap_or(&prose).to_string();
    if !(text.contains(&start.to_string()) || text.contains(&month_day)) {
        gaps.push("dates");
    }
    gaps
}

fn fallback_keypoint(gap: &str, query: &TravelQuery) -> String {
    match gap {
        "budget" => format!(
            "Budget Limit: The total cost of the trip, including transportation, accommodation, meals, and activities, must not exceed {}.",
            query.budget.to_dollar_string()
        ),
        _ => format!(
            "Departure and Return Dates: The travel must commence on {}, and conclude with a return to {} on {}.",
            prose_date(query.start_date),
            query.origin_city,
            prose_date(query.end_date)
        ),
    }
}

/// Keypoints with one corrective retry; still-missing budget or date points are appended.
pub fn generate_keypoints(session: &Session, query: &TravelQuery) -> Result<Vec<String>, OutlineError> {
    let mut feedback: Option<String> = None;
    let mut points = Vec::new();
    for _ in 0..2 {
        let ctx = PromptContext { query_text: Some(&query.text), feedback: feedback.as_deref(), ..Default::default() };
        points = match session.render_and_complete(AgentRole::Keypoints, &ctx) {
            Ok(text) => parse_list(&text),
            Err(LlmError::EmptyResponse(_)) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let gaps = if points.is_empty() { vec!["budget", "dates"] } else { keypoint_gaps(&points, query) };
        if gaps.is_empty() {
            return Ok(points);
        }
        feedback = Some(format!("the key points must mention the {}", gaps.join(" and the ")));
    }
    if points.is_empty() {
        return Err(OutlineError::Keypoints("empty output twice".into()));
    }
    for gap in keypoint_gaps(&points, query) {
        log::warn!("{}: keypoints lack the {gap}; adding it", query.id);
        points.push(fallback_keypoint(gap, query));
    }
    Ok(points)
}

/// Query-independent guides, generated once and shared.
#[derive(Default)]
pub struct GuidesCache {
    slot: Mutex<Option<Arc<Vec<String>>>>,
}

impl GuidesCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_generate(&self, gateway: &Gateway) -> Result<Arc<Vec<String>>, OutlineError> {
        let mut slot = self.slot.lock().expect("guides cache");
        if let Some(g) = slot.as_ref() {
            return Ok(g.clone());
        }
        let session = gateway.scoped(CORPUS_SCOPE);
        let mut feedback = None;
        for _ in 0..2 {
            let ctx = PromptContext { feedback, ..Default::default() };
            let guides = match session.render_and_complete(AgentRole::Commonsense, &ctx) {
                Ok(text) => parse_list(&text),
                Err(LlmError::EmptyResponse(_)) => Vec::new(),
                Err(e) => return Err(e.into()),
            };
            if !guides.is_empty() {
                let guides = Arc::new(guides);
                *slot = Some(guides.clone());
                return Ok(guides);
            }
            feedback = Some("the list was empty");
        }
        Err(OutlineError::Guides("empty output twice".into()))
    }
}

/// Guides that mention one of `cities`; they should be query independent.
pub fn guide_city_warnings<'a>(guides: &[String], cities: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let lowered: Vec<String> = guides.iter().map(|g| g.to_lowercase()).collect();
    let mut out = Vec::new();
    for city in cities {
        let c = city.to_lowercase();
        if let Some(i) = lowered.iter().position(|g| g.contains(&c)) {
            out.push(format!("guide {} mentions {city}", i + 1));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltOutline {
    pub outline: Outline,
    /// PathFinder calls made, including the accepted one.
    pub route_calls: u32,
    /// Feedback given after each rejected route.
    pub rejections: Vec<String>,
}

/// Route with at most `max_attempts` PathFinder calls, then keypoints and guides.
pub fn build_outline(
    session: &Session,
    query: &TravelQuery,
    db: &TravelDatabase,
    guides: &GuidesCache,
    max_attempts: u32,
) -> Result<BuiltOutline, OutlineError> {
    let mut rejections: Vec<String> = Vec::new();
    let mut accepted = None;
    for attempt in 1..=max_attempts {
        let route = match generate_route(session, query, db, rejections.last().map(String::as_str))? {
            Ok(r) => r,
            Err(e) => {
                log::info!("{}: route attempt {attempt} rejected: {e}", query.id);
                rejections.push(e.to_string());
                continue;
            }
        };
        let verdict = evaluate_transportation(&route, query, db);
        if verdict.is_feasible() {
            accepted = Some((route, verdict, attempt));
            break;
        }
        log::info!("{}: route attempt {attempt} infeasible", query.id);
        rejections.push(verdict.feedback);
    }
    let Some((route, verdict, route_calls)) = accepted else {
        return Err(OutlineError::RetriesExhausted {
            attempts: max_attempts,
            feedback: rejections.last().cloned().unwrap_or_default(),
        });
    };
    let keypoints = generate_keypoints(session, query)?;
    let guides = guides.get_or_generate(session.gateway())?;
    let outline = Outline { route, keypoints, guides, transport_notes: verdict.transport_notes() };
    Ok(BuiltOutline { outline, route_calls, rejections })
}

#[cfg(test)]
mod tests;
