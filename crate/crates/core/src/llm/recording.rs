use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Mutex;

use super::transcript::{append_entry, TranscriptEntry};
use super::{AgentRole, ChatBackend, ChatRequest, LlmError};

type Cursors = HashMap<(String, AgentRole), usize>;

/// Passes requests to an inner backend and keeps every successful exchange.
pub struct RecordingBackend<B> {
    inner: B,
    sink: Option<PathBuf>,
    state: Mutex<(Cursors, Vec<TranscriptEntry>)>,
}

impl<B: ChatBackend> RecordingBackend<B> {
    pub fn new(inner: B) -> Self {
        RecordingBackend { inner, sink: None, state: Mutex::new((HashMap::new(), Vec::new())) }
    }

    /// Also appends each entry to a transcript file as it is recorded.
    pub fn with_sink(inner: B, path: impl Into<PathBuf>) -> Self {
        RecordingBackend { sink: Some(path.into()), ..Self::new(inner) }
    }

    pub fn entries(&self) -> Vec<TranscriptEntry> {
        self.state.lock().expect("recording state").1.clone()
    }
}

impl<B: ChatBackend> ChatBackend for RecordingBackend<B> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let response = self.inner.complete(request)?;
        let mut state = self.state.lock().expect("recording state");
        let seq = state.0.entry((request.scope.clone(), request.role)).or_insert(0);
        let entry = TranscriptEntry {
            scope: request.scope.clone(),
            role: request.role,
            seq: *seq,
            digest: request.digest(),
            response: response.clone(),
        };
        *seq += 1;
        if let Some(path) = &self.sink {
            append_entry(path, &entry)?;
        }
        state.1.push(entry);
        Ok(response)
    }
}
