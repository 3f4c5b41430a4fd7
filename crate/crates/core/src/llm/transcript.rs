//! Transcript files: one JSON object per line, in call order.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AgentRole, LlmError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub scope: String,
    pub role: AgentRole,
    /// Position among this scope's requests for the role, from 0.
    pub seq: usize,
    pub digest: String,
    pub response: String,
}

pub fn read_transcript(path: &Path) -> Result<Vec<TranscriptEntry>, LlmError> {
    let file = fs::File::open(path).map_err(|e| LlmError::Transcript(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| LlmError::Transcript(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = serde_json::from_str(&line)
            .map_err(|e| LlmError::Transcript(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(entry);
    }
    Ok(out)
}

pub fn write_transcript(path: &Path, entries: &[TranscriptEntry]) -> Result<(), LlmError> {
    let mut text = String::new();
    for e in entries {
        text.push_str(&serde_json::to_string(e).map_err(|e| LlmError::Transcript(e.to_string()))?);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| LlmError::Transcript(format!("{}: {e}", path.display())))
}

pub(crate) fn append_entry(path: &Path, entry: &TranscriptEntry) -> Result<(), LlmError> {
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| LlmError::Transcript(format!("{}: {e}", path.display())))?;
    let line = serde_json::to_string(entry).map_err(|e| LlmError::Transcript(e.to_string()))?;
    writeln!(file, "{line}").map_err(|e| LlmError::Transcript(format!("{}: {e}", path.display())))
}
