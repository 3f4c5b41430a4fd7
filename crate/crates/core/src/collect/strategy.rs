use serde::{Deserialize, Serialize};

use crate::domain::ordinal_word;
use crate::llm::prompts::{gather_line, pop_rule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub index: u32,
    pub thought: String,
    /// The call as issued, or the raw text when it could not be parsed.
    pub action: String,
    pub observation: String,
}

impl Step {
    pub fn render(&self) -> String {
        format!(
            "Thought {i}: {}\n\nAction {i}: {}\n\nObservation {i}: {}",
            self.thought,
            self.action,
            self.observation,
            i = self.index
        )
    }
}

/// Running textual state that steers the Thought agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyBlock {
    pub route_text: String,
    pub keypoints_text: String,
    pub transport_notes: Vec<String>,
    pub current_day: u32,
    pub duration_days: u32,
    pub daily_budget: i64,
    pub min_pop: usize,
    pub steps: Vec<Step>,
    pub planner_notes: Vec<String>,
}

impl StrategyBlock {
    pub fn daily_budget_line(&self) -> String {
        format!(
            "Remember that the total daily expenses of your trip (the sum of expenses for each person) do not exceed {}.",
            self.daily_budget
        )
    }

    pub fn next_index(&self) -> u32 {
        self.steps.len() as u32 + 1
    }

    pub fn push(&mut self, thought: String, action: String, observation: String) {
        let index = self.next_index();
        self.steps.push(Step { index, thought, action, observation });
    }

    /// Observation after a day plan was accepted.
    pub fn day_planned_observation(&self, plan_text: &str, next_day: Option<u32>) -> String {
        let mut out = format!("Travel Plan:\n\n{}\nOutline:\n\n{}\n\n{}", plan_text.trim_end(), self.route_text, self.daily_budget_line());
        if let Some(d) = next_day {
            out.push_str(&format!("\n\n{}\n\n{}", gather_line(d), pop_rule(self.min_pop)));
        }
        out
    }

    pub fn render_steps(steps: &[Step]) -> String {
        steps.iter().map(Step::render).collect::<Vec<_>>().join("\n\n")
    }

    /// The last `m` steps.
    pub fn tail(&self, m: usize) -> String {
        let from = self.steps.len().saturating_sub(m);
        Self::render_steps(&self.steps[from..])
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "Below is a preliminary outline of your trip, which can serve as a reference for collecting information:\n\n{}\n\n\
             You now need to gather relevant information to specify the travel plan for the {} day.\n\n{}\n\n{}",
            self.route_text,
            ordinal_word(self.current_day),
            self.daily_budget_line(),
            self.keypoints_text.trim_end(),
        );
        if !self.transport_notes.is_empty() {
            out.push_str("\n\nTransportation limits:\n");
            out.push_str(&self.transport_notes.join("\n"));
        }
        if !self.planner_notes.is_empty() {
            out.push_str("\n\nProblems found by the planner:\n");
            out.push_str(&self.planner_notes.iter().map(|n| format!("- {n}")).collect::<Vec<_>>().join("\n"));
        }
        if !self.steps.is_empty() {
            out.push_str("\n\n");
            out.push_str(&Self::render_steps(&self.steps));
        }
        out
    }
}
