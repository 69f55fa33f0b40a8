use std::collections::VecDeque;
use std::sync::Mutex;

use super::{CompletionProvider, CompletionRequest, CompletionResponse, ProviderError};

/// Returns canned completions in order, then fails with `ScriptExhausted`.
#[derive(Debug, Default)]
pub struct ScriptedProvider {
    queue: Mutex<VecDeque<String>>,
}

impl ScriptedProvider {
    pub fn new<I, S>(completions: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedProvider { queue: Mutex::new(completions.into_iter().map(Into::into).collect()) }
    }

    pub fn remaining(&self) -> usize {
        self.queue.lock().expect("script lock").len()
    }
}

impl CompletionProvider for ScriptedProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        self.queue
            .lock()
            .expect("script lock")
            .pop_front()
            .map(CompletionResponse::text)
            .ok_or(ProviderError::ScriptExhausted { call_index: request.call_index })
    }
}

/// Wraps a closure; handy for stage-aware test scripts.
pub struct FnProvider<F>(pub F);

impl<F> CompletionProvider for FnProvider<F>
where
    F: Fn(&CompletionRequest) -> Result<CompletionResponse, ProviderError> + Send + Sync,
{
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        (self.0)(request)
    }
}
