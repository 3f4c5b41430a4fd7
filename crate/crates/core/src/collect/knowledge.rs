use serde::{Deserialize, Serialize};

use super::tool_call::ToolName;

pub const NO_RESULTS: &str = "no results";
pub const MASK_NOTICE: &str = "Masked due to limited length. Make sure the data has been written in Notebook.";
const SEPARATOR: &str = "-------------------------------------";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeItem {
    pub id: u64,
    pub day_collected: u32,
    pub description: String,
    pub lines: Vec<String>,
    pub tool: ToolName,
}

/// Append-only store of tool results; the planner sees a recent window of it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBlock {
    items: Vec<KnowledgeItem>,
    next_id: u64,
    min_pop: usize,
}

impl KnowledgeBlock {
    pub fn new(min_pop: usize) -> Self {
        KnowledgeBlock { items: Vec::new(), next_id: 1, min_pop: min_pop.max(1) }
    }

    pub fn items(&self) -> &[KnowledgeItem] {
        &self.items
    }

    pub fn min_pop(&self) -> usize {
        self.min_pop
    }

    /// Stores a result and returns the observation shown to the Thought agent.
    pub fn write(&mut self, day: u32, tool: ToolName, lines: Vec<String>, description: &str) -> String {
        let lines = if lines.is_empty() { vec![NO_RESULTS.to_string()] } else { lines };
        let description = description.trim().to_string();
        let observation = format!("{MASK_NOTICE} Successfully recorded in Notebook: {description}");
        self.items.push(KnowledgeItem { id: self.next_id, day_collected: day, description, lines, tool });
        self.next_id += 1;
        observation
    }

    /// Items gathered on `day` or the day before; when fewer than `min_pop`
    /// qualify, the last `min_pop` items instead. Oldest first.
    pub fn read(&self, day: u32) -> Vec<&KnowledgeItem> {
        let recent: Vec<&KnowledgeItem> = self
            .items
            .iter()
            .filter(|i| i.day_collected == day || i.day_collected + 1 == day)
            .collect();
        if recent.len() >= self.min_pop {
            return recent;
        }
        let skip = self.items.len().saturating_sub(self.min_pop);
        self.items[skip..].iter().collect()
    }
}

/// Numbered record lines per item, items separated by a rule.
pub fn render_dump(items: &[&KnowledgeItem]) -> String {
    let mut out = String::new();
    for (n, item) in items.iter().enumerate() {
        if n > 0 {
            out.push_str(SEPARATOR);
            out.push_str("\n\n");
        }
        out.push_str(&format!("{}\n\n", item.description));
        for (i, line) in item.lines.iter().enumerate() {
            out.push_str(&format!("{}: {line}\n\n", i + 1));
        }
    }
    out.trim_end().to_string()
}
