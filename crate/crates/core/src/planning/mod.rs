//! Phase three: sample several day plans, structure them, rank them by
//! verifier findings and pick one, sending the loop back for more
//! information at most once per day.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::collect::knowledge::{render_dump, KnowledgeBlock};
use crate::domain::{parse_day_value, DailyPlan, Money, TravelQuery};
use crate::llm::{AgentRole, LlmError, PromptContext, Session};
use crate::sandbox::TravelDatabase;
use crate::verify::{check_day, ConstraintReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub index: usize,
    pub raw: String,
    pub plan: Option<DailyPlan>,
    pub parse_error: Option<String>,
    pub report: Option<ConstraintReport>,
}

impl Candidate {
    pub fn is_parsed(&self) -> bool {
        self.plan.is_some()
    }

    /// (parse failed, significant findings, all findings, prefix cost, index).
    pub fn rank_key(&self) -> (bool, usize, usize, Money, usize) {
        match &self.report {
            Some(r) => (false, r.significant_count(), r.findings.len(), r.cost, self.index),
            None => (true, usize::MAX, usize::MAX, Money::ZERO, self.index),
        }
    }

    pub fn is_clean_enough(&self) -> bool {
        self.report.as_ref().is_some_and(|r| !r.has_significant())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub day: u32,
    /// 1 on the first planning attempt for the day, 2 after a replan.
    pub attempt: u32,
    pub candidates: Vec<Candidate>,
    /// Candidate indices, best first.
    pub order: Vec<usize>,
    pub chosen: Option<usize>,
}

/// Days that have already been sent back for more information.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplanState {
    pub replanned_days: BTreeSet<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DayOutcome {
    Planned { plan: DailyPlan, set: CandidateSet },
    Replan { notes: Vec<String>, set: CandidateSet },
    Failed { reason: String, set: Option<CandidateSet> },
}

/// Fixed inputs for planning one day.
pub struct PlanInputs<'a> {
    pub query: &'a TravelQuery,
    pub db: &'a TravelDatabase,
    pub outline_text: &'a str,
    pub k: usize,
}

/// k samples from one prompt. Failed samples are dropped.
pub fn generate_candidates(session: &Session, ctx: &PromptContext, k: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        match session.render_and_complete(AgentRole::Plan, ctx) {
            Ok(text) => out.push(text),
            Err(e) => log::warn!("{}: plan sample {} failed: {e}", session.scope(), i + 1),
        }
    }
    out
}

/// First balanced JSON object in the text.
fn json_object(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let mut depth = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (i, ch) in text[start..].char_indices() {
        if in_str {
            match ch {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' => in_str = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..start + i + 1]);
                }
            }
            _ => {}
        }
    }
    None
}

fn structure_once(text: &str, day: u32) -> Result<DailyPlan, String> {
    let obj = json_object(text).ok_or("no JSON object in the reply")?;
    let value: serde_json::Value = serde_json::from_str(obj).map_err(|e| e.to_string())?;
    parse_day_value(&value, Some(day)).map_err(|e| e.to_string())
}

/// Converts a raw day plan through the Evaluate agent, with one corrective retry.
pub fn plan_to_structured(session: &Session, raw: &str, day: u32) -> Result<DailyPlan, String> {
    let mut feedback: Option<String> = None;
    for _ in 0..2 {
        let ctx = PromptContext { plan_text: Some(raw), day: Some(day), feedback: feedback.as_deref(), ..Default::default() };
        let error = match session.render_and_complete(AgentRole::Evaluate, &ctx) {
            Ok(reply) => match structure_once(&reply, day) {
                Ok(plan) => return Ok(plan),
                Err(e) => e,
            },
            Err(e @ LlmError::EmptyResponse(_)) => e.to_string(),
            Err(e) => return Err(e.to_string()),
        };
        feedback = Some(error);
    }
    Err(feedback.unwrap_or_default())
}

/// Best first: fewer significant findings, fewer findings, lower running cost, lower index.
pub fn rank_candidates(
    candidates: &mut [Candidate],
    query: &TravelQuery,
    db: &TravelDatabase,
    prior: &[DailyPlan],
) -> Vec<usize> {
    for c in candidates.iter_mut() {
        c.report = c.plan.as_ref().map(|p| check_day(p, prior, query, db));
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by_key(|&i| candidates[i].rank_key());
    order.into_iter().map(|i| candidates[i].index).collect()
}

fn notes_for(set: &CandidateSet) -> Vec<String> {
    let mut notes: Vec<String> = Vec::new();
    let mut push = |n: String| {
        if !notes.contains(&n) {
            notes.push(n);
        }
    };
    for c in &set.candidates {
        match &c.report {
            None => push(format!("Day {}: a draft could not be converted to the plan format", set.day)),
            Some(r) => {
                for f in r.findings.iter().filter(|f| f.code.is_significant()) {
                    let mut n = String::new();
                    let _ = write!(n, "Day {}: {} in {}: {}", f.location.day, f.code, f.location.field.label(), f.detail);
                    push(n);
                }
            }
        }
    }
    notes
}

/// Plans `day` from the popped knowledge, or asks for more collection once.
#[allow(clippy::too_many_arguments)]
pub fn daily_plan_step(
    session: &Session,
    inputs: &PlanInputs,
    day: u32,
    request: &str,
    knowledge: &KnowledgeBlock,
    planner_notes: &[String],
    prior: &[DailyPlan],
    replan: &mut ReplanState,
) -> DayOutcome {
    let attempt = if replan.replanned_days.contains(&day) { 2 } else { 1 };
    let dump = render_dump(&knowledge.read(day));
    let notes = planner_notes.join("\n");
    let ctx = PromptContext {
        query_text: Some(&inputs.query.text),
        outline: Some(inputs.outline_text),
        knowledge: Some(&dump),
        notes: Some(&notes),
        instruction: Some(request),
        day: Some(day),
        duration: Some(inputs.query.duration_days),
        ..Default::default()
    };
    let raws = generate_candidates(session, &ctx, inputs.k);
    if raws.is_empty() {
        return DayOutcome::Failed { reason: format!("no plan samples for day {day}"), set: None };
    }
    let mut candidates: Vec<Candidate> = raws
        .into_iter()
        .enumerate()
        .map(|(index, raw)| {
            let (plan, parse_error) = match plan_to_structured(session, &raw, day) {
                Ok(p) => (Some(p), None),
                Err(e) => (None, Some(e)),
            };
            Candidate { index, raw, plan, parse_error, report: None }
        })
        .collect();
    let order = rank_candidates(&mut candidates, inputs.query, inputs.db, prior);
    let mut set = CandidateSet { day, attempt, candidates, order, chosen: None };
    let best = set.order[0];
    if set.candidates[best].is_clean_enough() {
        set.chosen = Some(best);
        let plan = set.candidates[best].plan.clone().expect("clean candidate is parsed");
        return DayOutcome::Planned { plan, set };
    }
    if attempt == 1 {
        replan.replanned_days.insert(day);
        return DayOutcome::Replan { notes: notes_for(&set), set };
    }
    match set.order.iter().copied().find(|&i| set.candidates[i].is_parsed()) {
        Some(i) => {
            set.chosen = Some(i);
            let plan = set.candidates[i].plan.clone().expect("parsed");
            DayOutcome::Planned { plan, set }
        }
        None => DayOutcome::Failed { reason: format!("no usable plan for day {day} after replanning"), set: Some(set) },
    }
}
