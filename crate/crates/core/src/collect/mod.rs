//! Phase two: the Thought / Action / Observation loop over the sandbox tools,
//! with the Strategy Block as running context and the Knowledge Block as the
//! store the day planner reads from.

pub mod knowledge;
mod strategy;
mod tool_call;
pub mod tools;

use serde::{Deserialize, Serialize};

pub use knowledge::{render_dump, KnowledgeBlock, KnowledgeItem};
pub use strategy::{Step, StrategyBlock};
pub use tool_call::{parse_tool_call, ToolCall, ToolCallError, ToolName};

use crate::domain::{ordinal_word, DailyPlan, ErrorCode, TravelPlan, TravelQuery};
use crate::llm::{AgentRole, LlmError, PromptContext, Session};
use crate::outline::Outline;
use crate::planning::{daily_plan_step, CandidateSet, DayOutcome, PlanInputs, ReplanState};
use crate::sandbox::TravelDatabase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopConfig {
    pub step_limit: u32,
    pub k_candidates: usize,
    pub min_pop: usize,
    /// Steps of history shown to the Tool agent.
    pub tail_steps: usize,
    pub max_malformed: u32,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig { step_limit: 45, k_candidates: 3, min_pop: 5, tail_steps: 3, max_malformed: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeliveryFailure {
    pub code: ErrorCode,
    pub message: String,
}

/// Structured record of what happened during a run, for the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum RunEvent {
    Step { step: Step },
    Candidates { set: CandidateSet },
    Replan { day: u32, notes: Vec<String> },
    DayPlanned { day: u32, chosen: Option<usize> },
    Failure { failure: DeliveryFailure },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectionResult {
    pub result: Result<TravelPlan, DeliveryFailure>,
    pub steps_used: u32,
    pub strategy: StrategyBlock,
    pub knowledge: KnowledgeBlock,
    pub events: Vec<RunEvent>,
}

fn strip_label<'a>(text: &'a str, label: &str) -> &'a str {
    let t = text.trim();
    let lower = t.to_lowercase();
    if lower.starts_with(&label.to_lowercase()) {
        if let Some(i) = t.find(':') {
            return t[i + 1..].trim();
        }
    }
    t
}

fn describe(session: &Session, call: &ToolCall, lines: &[String]) -> String {
    let preview = if lines.is_empty() { knowledge::NO_RESULTS.to_string() } else { lines.iter().take(5).cloned().collect::<Vec<_>>().join("\n") };
    let call_text = call.to_string();
    let ctx = PromptContext { tool_call: Some(&call_text), tool_result: Some(&preview), ..Default::default() };
    match session.render_and_complete(AgentRole::Description, &ctx) {
        Ok(text) => {
            let line = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
            let line = strip_label(line, "Description");
            if line.is_empty() {
                format!("Results of {call_text}")
            } else {
                line.to_string()
            }
        }
        Err(e) => {
            log::warn!("{}: description failed: {e}", session.scope());
            format!("Results of {call_text}")
        }
    }
}

struct Loop<'s, 'a> {
    session: &'s Session<'a>,
    query: &'s TravelQuery,
    db: &'s TravelDatabase,
    outline_text: String,
    config: LoopConfig,
    strategy: StrategyBlock,
    knowledge: KnowledgeBlock,
    days: Vec<DailyPlan>,
    replan: ReplanState,
    events: Vec<RunEvent>,
    history: Vec<Option<(ToolName, Vec<String>)>>,
    malformed: u32,
}

enum StepEnd {
    Continue,
    Stop(DeliveryFailure),
}

fn failure(code: ErrorCode, message: impl Into<String>) -> StepEnd {
    StepEnd::Stop(DeliveryFailure { code, message: message.into() })
}

fn backend(e: LlmError) -> StepEnd {
    failure(ErrorCode::BackendFailure, e.to_string())
}

impl Loop<'_, '_> {
    fn thought(&self, step: u32) -> Result<String, LlmError> {
        let strategy = self.strategy.render();
        let ctx = PromptContext { strategy: Some(&strategy), day: Some(self.strategy.current_day), step: Some(step), ..Default::default() };
        let text = match self.session.render_and_complete(AgentRole::Thought, &ctx) {
            Err(LlmError::EmptyResponse(_)) => self.session.render_and_complete(AgentRole::Thought, &ctx)?,
            other => other?,
        };
        Ok(strip_label(&text, "Thought").to_string())
    }

    /// Tool agent reply parsed into a call, with one corrective reprompt.
    fn action(&self, step: u32, thought: &str) -> Result<Result<ToolCall, (String, ToolCallError)>, LlmError> {
        let tail = self.strategy.tail(self.config.tail_steps);
        let mut feedback: Option<String> = None;
        let mut last = (String::new(), ToolCallError::NotFound);
        for _ in 0..2 {
            let ctx = PromptContext {
                query_text: Some(&self.query.text),
                thought: Some(thought),
                strategy_tail: Some(&tail),
                step: Some(step),
                feedback: feedback.as_deref(),
                ..Default::default()
            };
            let reply = match self.session.render_and_complete(AgentRole::Tool, &ctx) {
                Ok(r) => r,
                Err(LlmError::EmptyResponse(_)) => String::new(),
                Err(e) => return Err(e),
            };
            match parse_tool_call(&reply) {
                Ok(call) => return Ok(Ok(call)),
                Err(e) => {
                    feedback = Some(e.to_string());
                    last = (reply.trim().to_string(), e);
                }
            }
        }
        Ok(Err(last))
    }

    fn repeats(&self, call: &ToolCall) -> bool {
        let key = Some(call.normalized());
        self.history.len() >= 2 && self.history[self.history.len() - 2..].iter().all(|h| *h == key)
    }

    fn plan_day(&mut self, call: &ToolCall) -> Result<String, StepEnd> {
        let day = self.days.len() as u32 + 1;
        let inputs = PlanInputs { query: self.query, db: self.db, outline_text: &self.outline_text, k: self.config.k_candidates };
        let outcome = daily_plan_step(
            self.session,
            &inputs,
            day,
            &call.args[0],
            &self.knowledge,
            &self.strategy.planner_notes,
            &self.days,
            &mut self.replan,
        );
        match outcome {
            DayOutcome::Planned { plan, set } => {
                self.events.push(RunEvent::DayPlanned { day, chosen: set.chosen });
                self.events.push(RunEvent::Candidates { set });
                let text = plan.to_text();
                self.days.push(plan);
                self.strategy.planner_notes.clear();
                let next = (day < self.query.duration_days).then_some(day + 1);
                if let Some(d) = next {
                    self.strategy.current_day = d;
                }
                Ok(self.strategy.day_planned_observation(&text, next))
            }
            DayOutcome::Replan { notes, set } => {
                self.events.push(RunEvent::Candidates { set });
                self.events.push(RunEvent::Replan { day, notes: notes.clone() });
                for n in &notes {
                    if !self.strategy.planner_notes.contains(n) {
                        self.strategy.planner_notes.push(n.clone());
                    }
                }
                let list: Vec<String> = notes.iter().map(|n| format!("- {n}")).collect();
                Ok(format!(
                    "The drafts for the {} day have problems:\n{}\nCollect the missing information, then use DailyPlanner again.",
                    ordinal_word(day),
                    list.join("\n")
                ))
            }
            DayOutcome::Failed { reason, set } => {
                if let Some(set) = set {
                    self.events.push(RunEvent::Candidates { set });
                }
                Err(failure(ErrorCode::DayPlanFailure, reason))
            }
        }
    }

    fn step(&mut self, index: u32) -> StepEnd {
        let thought = match self.thought(index) {
            Ok(t) => t,
            Err(e) => return backend(e),
        };
        let call = match self.action(index, &thought) {
            Err(e) => return backend(e),
            Ok(Err((raw, err))) => {
                self.malformed += 1;
                self.history.push(None);
                self.record(thought, raw, format!("Invalid action: {err}."));
                if self.malformed >= self.config.max_malformed {
                    return failure(ErrorCode::MalformedToolCall, format!("{} malformed tool calls", self.malformed));
                }
                return StepEnd::Continue;
            }
            Ok(Ok(call)) => call,
        };
        if self.repeats(&call) {
            self.record(thought, call.to_string(), "The same action was issued three times in a row.".into());
            return failure(ErrorCode::RepeatedToolLoop, format!("{call} issued three times in a row"));
        }
        self.history.push(Some(call.normalized()));
        let observation = if call.name == ToolName::DailyPlanner {
            match self.plan_day(&call) {
                Ok(o) => o,
                Err(end) => {
                    self.record(thought, call.to_string(), "The planner could not produce a plan.".into());
                    return end;
                }
            }
        } else {
            match tools::execute(&call, self.db) {
                Ok(lines) => {
                    let description = describe(self.session, &call, &lines);
                    self.knowledge.write(self.strategy.current_day, call.name, lines, &description)
                }
                Err(msg) => msg,
            }
        };
        self.record(thought, call.to_string(), observation);
        StepEnd::Continue
    }

    fn record(&mut self, thought: String, action: String, observation: String) {
        self.strategy.push(thought, action, observation);
        let step = self.strategy.steps.last().cloned().expect("just pushed");
        self.events.push(RunEvent::Step { step });
    }
}

/// Alternates thought, action and observation until every day is planned or a
/// delivery failure occurs. Always returns a structured result.
pub fn run_collection_loop(
    session: &Session,
    query: &TravelQuery,
    outline: &Outline,
    db: &TravelDatabase,
    config: LoopConfig,
) -> CollectionResult {
    let keypoints_text: String = outline.keypoints.iter().enumerate().map(|(i, k)| format!("{}.{k}\n", i + 1)).collect();
    let strategy = StrategyBlock {
        route_text: outline.route.to_string(),
        keypoints_text,
        transport_notes: outline.transport_notes.clone(),
        current_day: 1,
        duration_days: query.duration_days,
        daily_budget: query.daily_budget(),
        min_pop: config.min_pop,
        steps: Vec::new(),
        planner_notes: Vec::new(),
    };
    let mut lp = Loop {
        session,
        query,
        db,
        outline_text: outline.render_text(),
        config,
        strategy,
        knowledge: KnowledgeBlock::new(config.min_pop),
        days: Vec::new(),
        replan: ReplanState::default(),
        events: Vec::new(),
        history: Vec::new(),
        malformed: 0,
    };
    let mut steps_used = 0;
    let result = loop {
        if lp.days.len() as u32 >= query.duration_days {
            break Ok(TravelPlan { query_id: query.id.clone(), days: std::mem::take(&mut lp.days) });
        }
        if steps_used >= config.step_limit {
            break Err(DeliveryFailure {
                code: ErrorCode::StepLimitExceeded,
                message: format!("{} days planned after {} steps", lp.days.len(), config.step_limit),
            });
        }
        steps_used += 1;
        if let StepEnd::Stop(f) = lp.step(steps_used) {
            break Err(f);
        }
    };
    if let Err(f) = &result {
        lp.events.push(RunEvent::Failure { failure: f.clone() });
    }
    CollectionResult { result, steps_used, strategy: lp.strategy, knowledge: lp.knowledge, events: lp.events }
}
