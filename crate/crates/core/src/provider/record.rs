use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{prompt_hash, CompletionProvider, CompletionRequest, CompletionResponse, ProviderError, Usage};

/// One logged provider call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallRecord {
    pub call_index: u64,
    pub stage: String,
    pub prompt_hash: String,
    pub prompt: String,
    pub completion: String,
    pub usage: Option<Usage>,
}

pub trait CallSink: Send + Sync {
    fn append(&self, record: &CallRecord) -> Result<(), ProviderError>;
}

#[derive(Debug, Default)]
pub struct MemorySink {
    records: Mutex<Vec<CallRecord>>,
}

impl MemorySink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn records(&self) -> Vec<CallRecord> {
        self.records.lock().expect("sink lock").clone()
    }
}

impl CallSink for MemorySink {
    fn append(&self, record: &CallRecord) -> Result<(), ProviderError> {
        self.records.lock().expect("sink lock").push(record.clone());
        Ok(())
    }
}

/// Appends one JSON object per call to a file.
#[derive(Debug)]
pub struct JsonlSink {
    out: Mutex<BufWriter<File>>,
}

impl JsonlSink {
    pub fn create(path: &Path) -> std::io::Result<Self> {
        Ok(JsonlSink { out: Mutex::new(BufWriter::new(File::create(path)?)) })
    }
}

impl CallSink for JsonlSink {
    fn append(&self, record: &CallRecord) -> Result<(), ProviderError> {
        let line = serde_json::to_string(record).map_err(|e| ProviderError::Sink { message: e.to_string() })?;
        let mut out = self.out.lock().expect("sink lock");
        writeln!(out, "{line}")
            .and_then(|_| out.flush())
            .map_err(|e| ProviderError::Sink { message: e.to_string() })
    }
}

/// Passes calls through to `inner`, logging each successful one.
pub struct RecordingProvider<P, S> {
    inner: P,
    sink: S,
}

impl<P, S> RecordingProvider<P, S> {
    pub fn new(inner: P, sink: S) -> Self {
        RecordingProvider { inner, sink }
    }

    pub fn sink(&self) -> &S {
        &self.sink
    }

    pub fn into_parts(self) -> (P, S) {
        (self.inner, self.sink)
    }
}

impl<P: CompletionProvider, S: CallSink> CompletionProvider for RecordingProvider<P, S> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        let response = self.inner.complete(request)?;
        self.sink.append(&CallRecord {
            call_index: request.call_index,
            stage: request.stage.clone(),
            prompt_hash: prompt_hash(&request.prompt),
            prompt: request.prompt.clone(),
            completion: response.text.clone(),
            usage: response.usage,
        })?;
        Ok(response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::{request, ScriptedProvider};

    #[test]
    fn records_one_entry() {
        let p = RecordingProvider::new(ScriptedProvider::new(["X"]), MemorySink::new());
        p.complete(&request(0, "prompt")).unwrap();
        let recs = p.sink().records();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].completion, "X");
        assert_eq!(recs[0].prompt_hash, prompt_hash("prompt"));
    }

    #[test]
    fn zero_calls_and_inner_errors_leave_sink_empty() {
        let p = RecordingProvider::new(ScriptedProvider::new(Vec::<String>::new()), MemorySink::new());
        assert!(p.sink().records().is_empty());
        assert!(p.complete(&request(0, "prompt")).is_err());
        assert!(p.sink().records().is_empty());
    }

    #[test]
    fn jsonl_sink_writes_lines() {
        let dir = std::env::temp_dir().join(format!("calls-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("calls.jsonl");
        let p = RecordingProvider::new(ScriptedProvider::new(["A", "B"]), JsonlSink::create(&path).unwrap());
        p.complete(&request(0, "one")).unwrap();
        p.complete(&request(1, "two")).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let recs: Vec<CallRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(recs.iter().map(|r| r.completion.as_str()).collect::<Vec<_>>(), ["A", "B"]);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
