use std::collections::BTreeMap;
use std::time::Duration;

use super::{prompt_hash, CallRecord, CompletionProvider, CompletionRequest, CompletionResponse, ProviderError, Usage};

#[derive(Debug, Clone)]
enum Stored {
    Completion { text: String, usage: Option<Usage> },
    Failure(ProviderError),
}

/// Serves recorded completions by call index, checking the prompt hash.
#[derive(Debug, Clone, Default)]
pub struct ReplayProvider {
    calls: BTreeMap<u64, (String, Stored)>,
}

impl ReplayProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records<I: IntoIterator<Item = CallRecord>>(records: I) -> Self {
        let mut p = Self::new();
        for r in records {
            p.insert_completion(r.call_index, r.prompt_hash, r.completion, r.usage);
        }
        p
    }

    pub fn insert_completion(&mut self, call_index: u64, prompt_hash: String, text: String, usage: Option<Usage>) {
        self.calls.insert(call_index, (prompt_hash, Stored::Completion { text, usage }));
    }

    /// Replays a recorded failure so aborted games reproduce exactly.
    pub fn insert_failure(&mut self, call_index: u64, prompt_hash: String, error: ProviderError) {
        self.calls.insert(call_index, (prompt_hash, Stored::Failure(error)));
    }

    pub fn len(&self) -> usize {
        self.calls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.calls.is_empty()
    }
}

impl CompletionProvider for ReplayProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        let index = request.call_index;
        let (hash, stored) = self.calls.get(&index).ok_or(ProviderError::ReplayMissing { call_index: index })?;
        let found = prompt_hash(&request.prompt);
        if &found != hash {
            return Err(ProviderError::ReplayMismatch { call_index: index, expected: hash.clone(), found });
        }
        match stored {
            Stored::Completion { text, usage } => {
                Ok(CompletionResponse { text: text.clone(), usage: *usage, latency: Duration::ZERO })
            }
            Stored::Failure(e) => Err(e.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::request;

    fn provider() -> ReplayProvider {
        let mut p = ReplayProvider::new();
        p.insert_completion(3, prompt_hash("the prompt"), "stored".into(), None);
        p
    }

    #[test]
    fn matching_hash_returns_stored_text() {
        assert_eq!(provider().complete(&request(3, "the prompt")).unwrap().text, "stored");
    }

    #[test]
    fn mismatch_names_index() {
        let err = provider().complete(&request(3, "other prompt")).unwrap_err();
        assert!(matches!(err, ProviderError::ReplayMismatch { call_index: 3, .. }));
        assert!(err.to_string().contains("call 3"));
    }

    #[test]
    fn missing_index() {
        assert_eq!(
            provider().complete(&request(4, "the prompt")),
            Err(ProviderError::ReplayMissing { call_index: 4 })
        );
    }
}
