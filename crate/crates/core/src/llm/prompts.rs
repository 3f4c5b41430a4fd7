//! Prompt rendering per agent role. Rendering is a pure function of the context.

use super::{AgentRole, LlmError, Message};
use crate::domain::ordinal_word;

/// Everything a prompt may draw on. Each role reads only the fields it needs.
#[derive(Debug, Clone, Copy, Default)]
pub struct PromptContext<'a> {
    pub query_text: Option<&'a str>,
    /// Route facts for the PathFinder: origin, dates, destination scope, candidate cities.
    pub route_facts: Option<&'a str>,
    /// Corrective note on a retry.
    pub feedback: Option<&'a str>,
    pub strategy: Option<&'a str>,
    pub strategy_tail: Option<&'a str>,
    pub step: Option<u32>,
    pub day: Option<u32>,
    pub duration: Option<u32>,
    pub thought: Option<&'a str>,
    pub tool_call: Option<&'a str>,
    pub tool_result: Option<&'a str>,
    pub outline: Option<&'a str>,
    pub knowledge: Option<&'a str>,
    pub notes: Option<&'a str>,
    pub instruction: Option<&'a str>,
    pub plan_text: Option<&'a str>,
}

pub const TOOL_DOCS: &str = "\
(1) FlightSearch[Departure City, Destination City, Date]: flights between two cities on a date (YYYY-MM-DD).
(2) DistanceMatrix[Origin, Destination, Mode]: driving distance, time and cost; Mode is self-driving or taxi.
(3) AccommodationSearch[City]: accommodations in a city.
(4) RestaurantSearch[City]: restaurants in a city.
(5) AttractionSearch[City]: attractions in a city.
(6) CitySearch[State]: cities in a state.
(7) DailyPlanner[Request]: writes the plan for the current day from the collected information.";

pub const PLAN_FORMAT: &str = "\
Day {d}:
Current City: from A to B, or B
Transportation: Flight Number: ..., from A to B, Departure Time: ..., Arrival Time: ... / Self-driving, from A to B, ... / Taxi, from A to B, ... / -
Breakfast: Name, City / -
Attraction: Name, City;Name, City; / -
Lunch: Name, City / -
Dinner: Name, City / -
Accommodation: Name, City / -";

/// Reminder of which knowledge the DailyPlanner can see.
pub fn pop_rule(min_pop: usize) -> String {
    format!(
        "Each time you use the DailyPlanner tool, the planner can only access information queried during the previous 2 days. However, if the number of queries in the past 2 days is less than {min_pop}, then it will return the last {min_pop} queried pieces of information."
    )
}

pub fn gather_line(day: u32) -> String {
    format!("You should gather the necessary information to plan your trip for the {} day.", ordinal_word(day))
}

fn need<T>(role: AgentRole, field: &'static str, v: Option<T>) -> Result<T, LlmError> {
    v.ok_or(LlmError::MissingContext { role, field })
}

fn with_feedback(mut text: String, feedback: Option<&str>) -> String {
    if let Some(f) = feedback {
        text.push_str("\n\nYour previous answer was rejected: ");
        text.push_str(f);
        text.push_str("\nPlease correct it.");
    }
    text
}

pub fn render_prompt(role: AgentRole, ctx: &PromptContext) -> Result<Vec<Message>, LlmError> {
    let c = ctx;
    let messages = match role {
        AgentRole::PathFinder => {
            let query = need(role, "query_text", c.query_text)?;
            let facts = need(role, "route_facts", c.route_facts)?;
            vec![
                Message::system(
                    "You are a route planner. Write one line per day of the trip and nothing else, in this form:\n\
                     The First Day: from <origin> to <city>. Exploring <city>.\n\
                     The Second Day: Exploring <city>.\n\
                     The Third Day: from <city> to <origin>.\n\
                     Every trip leaves the origin on the first day and returns to it on the last day. \
                     A day that moves between cities starts with \"from X to Y\". Use only the candidate cities listed.",
                ),
                Message::user(with_feedback(format!("Query: {query}\n\n{facts}"), c.feedback)),
            ]
        }
        AgentRole::Keypoints => {
            let query = need(role, "query_text", c.query_text)?;
            vec![
                Message::system(
                    "List the key points a travel plan for this query must respect, as a numbered list with one point per line \
                     (\"1.Title: text\"). Always state the departure and return dates and the budget limit with its exact amount.",
                ),
                Message::user(with_feedback(format!("Query: {query}"), c.feedback)),
            ]
        }
        AgentRole::Commonsense => vec![
            Message::system(
                "Write general guidelines that any sensible multi-day travel plan follows, as a numbered list with one guideline per line. \
                 Do not mention specific cities or dates.",
            ),
            Message::user(with_feedback("Give the guidelines.".to_string(), c.feedback)),
        ],
        AgentRole::Thought => {
            let strategy = need(role, "strategy", c.strategy)?;
            let day = need(role, "day", c.day)?;
            let step = need(role, "step", c.step)?;
            vec![
                Message::system(format!(
                    "You collect information for a travel plan one step at a time. Available tools:\n{TOOL_DOCS}\n\
                     Reply with a single thought that says what to look up next, or that the information for the day is enough \
                     and the DailyPlanner should be called. Start the reply with \"Thought {step}:\"."
                )),
                Message::user(format!("{strategy}\n\n{}\n\nThought {step}:", gather_line(day))),
            ]
        }
        AgentRole::Tool => {
            let query = need(role, "query_text", c.query_text)?;
            let thought = need(role, "thought", c.thought)?;
            let step = need(role, "step", c.step)?;
            let tail = c.strategy_tail.unwrap_or("");
            vec![
                Message::system(format!(
                    "Turn the thought into exactly one tool call. Tools:\n{TOOL_DOCS}\n\
                     Reply with one line of the form \"Action {step}: ToolName[arguments]\" and nothing else."
                )),
                Message::user(with_feedback(
                    format!("Query: {query}\n\n{tail}\n\nThought {step}: {thought}\nAction {step}:"),
                    c.feedback,
                )),
            ]
        }
        AgentRole::Description => {
            let call = need(role, "tool_call", c.tool_call)?;
            let result = need(role, "tool_result", c.tool_result)?;
            vec![
                Message::system(
                    "Describe the search result in one short line, e.g. \"Flight Information for Ontario to Honolulu on March 4, 2022\".",
                ),
                Message::user(format!("Call: {call}\nResult:\n{result}")),
            ]
        }
        AgentRole::Plan => {
            let query = need(role, "query_text", c.query_text)?;
            let outline = need(role, "outline", c.outline)?;
            let knowledge = need(role, "knowledge", c.knowledge)?;
            let day = need(role, "day", c.day)?;
            let duration = need(role, "duration", c.duration)?;
            let mut user = format!("Query: {query}\n\nOutline:\n{outline}\n\nCollected information:\n{knowledge}\n");
            if let Some(notes) = c.notes.filter(|n| !n.is_empty()) {
                user.push_str(&format!("\nProblems found in earlier drafts:\n{notes}\n"));
            }
            if let Some(req) = c.instruction {
                user.push_str(&format!("\nRequest: {req}\n"));
            }
            user.push_str(&format!("\nWrite the plan for Day {day} of {duration}."));
            vec![
                Message::system(format!(
                    "You write one day of a travel plan using only the collected information. Use names exactly as listed. \
                     Write \"-\" for anything not needed. Format:\n{}",
                    PLAN_FORMAT.replace("{d}", &day.to_string())
                )),
                Message::user(user),
            ]
        }
        AgentRole::Evaluate => {
            let text = need(role, "plan_text", c.plan_text)?;
            let day = need(role, "day", c.day)?;
            vec![
                Message::system(
                    "Convert the day plan into a JSON object with exactly the keys day, current_city, transportation, breakfast, \
                     attraction, lunch, dinner, accommodation. Values are strings in the form \"Name, City\"; attractions are \
                     joined as \"Name, City;Name, City;\"; write \"-\" for empty fields. Reply with the JSON object only.",
                ),
                Message::user(with_feedback(format!("Day {day} plan:\n{text}"), c.feedback)),
            ]
        }
    };
    Ok(messages)
}
