use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use super::transcript::{read_transcript, TranscriptEntry};
use super::{AgentRole, ChatBackend, ChatRequest, LlmError};

/// Serves recorded responses per (scope, role) in sequence order.
///
/// Digest mismatches are logged and counted; in strict mode they fail the call.
pub struct ReplayBackend {
    entries: HashMap<(String, AgentRole), Vec<TranscriptEntry>>,
    cursors: Mutex<HashMap<(String, AgentRole), usize>>,
    mismatches: Mutex<Vec<(String, AgentRole, usize)>>,
    strict: bool,
}

impl ReplayBackend {
    pub fn new(entries: Vec<TranscriptEntry>, strict: bool) -> Self {
        let mut by_key: HashMap<(String, AgentRole), Vec<TranscriptEntry>> = HashMap::new();
        for e in entries {
            by_key.entry((e.scope.clone(), e.role)).or_default().push(e);
        }
        for list in by_key.values_mut() {
            list.sort_by_key(|e| e.seq);
        }
        ReplayBackend {
            entries: by_key,
            cursors: Mutex::new(HashMap::new()),
            mismatches: Mutex::new(Vec::new()),
            strict,
        }
    }

    pub fn from_file(path: &Path, strict: bool) -> Result<Self, LlmError> {
        Ok(Self::new(read_transcript(path)?, strict))
    }

    /// (scope, role, seq) of every served entry whose digest differed.
    pub fn mismatches(&self) -> Vec<(String, AgentRole, usize)> {
        self.mismatches.lock().expect("mismatch list").clone()
    }

    /// Entries not yet served for a scope.
    pub fn remaining(&self, scope: &str) -> usize {
        let cursors = self.cursors.lock().expect("replay cursors");
        self.entries
            .iter()
            .filter(|((s, _), _)| s == scope)
            .map(|(k, list)| list.len() - cursors.get(k).copied().unwrap_or(0))
            .sum()
    }
}

impl ChatBackend for ReplayBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let key = (request.scope.clone(), request.role);
        let seq = {
            let mut cursors = self.cursors.lock().expect("replay cursors");
            let cursor = cursors.entry(key.clone()).or_insert(0);
            let available = self.entries.get(&key).map_or(0, Vec::len);
            if *cursor >= available {
                return Err(LlmError::ReplayExhausted { scope: key.0, role: key.1, served: *cursor });
            }
            *cursor += 1;
            *cursor - 1
        };
        let entry = &self.entries[&key][seq];
        let digest = request.digest();
        if entry.digest != digest {
            if self.strict {
                return Err(LlmError::DigestMismatch {
                    scope: key.0,
                    role: key.1,
                    seq,
                    expected: entry.digest.clone(),
                    actual: digest,
                });
            }
            log::warn!("replay digest mismatch for {} #{seq} in {}", key.1, key.0);
            self.mismatches.lock().expect("mismatch list").push((key.0, key.1, seq));
        }
        Ok(entry.response.clone())
    }
}
