//! Completion providers: the text-completion contract the pipelines call,
//! plus scripted, oracle, recording, replay and retrying implementations.

use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod oracle;
mod record;
mod replay;
mod retry;
mod scripted;

pub use oracle::OracleProvider;
pub use record::{CallRecord, CallSink, JsonlSink, MemorySink, RecordingProvider};
pub use replay::ReplayProvider;
pub use retry::{RetryPolicy, RetryingProvider};
pub use scripted::{FnProvider, ScriptedProvider};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    /// `None` leaves the provider default in place.
    pub temperature: Option<f64>,
    pub max_output_tokens: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionRequest {
    pub model_id: String,
    pub prompt: String,
    pub sampling: Sampling,
    /// Sequence number of the call within one game.
    pub call_index: u64,
    /// Template id the prompt was rendered from. Never sent over the wire.
    pub stage: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResponse {
    pub text: String,
    pub usage: Option<Usage>,
    pub latency: Duration,
}

impl CompletionResponse {
    pub fn text(text: impl Into<String>) -> Self {
        CompletionResponse { text: text.into(), usage: None, latency: Duration::ZERO }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProviderError {
    #[error("transient provider failure: {message}")]
    Transient { message: String },
    #[error("permanent provider failure: {message}")]
    Permanent { message: String },
    #[error("script exhausted at call {call_index}")]
    ScriptExhausted { call_index: u64 },
    #[error("replay prompt mismatch at call {call_index}: recorded {expected}, got {found}")]
    ReplayMismatch { call_index: u64, expected: String, found: String },
    #[error("no recorded completion for call {call_index}")]
    ReplayMissing { call_index: u64 },
    #[error("gave up after {attempts} attempts: {last}")]
    ExhaustedRetries { attempts: u32, last: Box<ProviderError> },
    #[error("call log write failed: {message}")]
    Sink { message: String },
}

impl ProviderError {
    pub fn transient(message: impl Into<String>) -> Self {
        ProviderError::Transient { message: message.into() }
    }

    pub fn permanent(message: impl Into<String>) -> Self {
        ProviderError::Permanent { message: message.into() }
    }

    pub fn is_transient(&self) -> bool {
        matches!(self, ProviderError::Transient { .. })
    }
}

/// A text-completion backend. Implementations must tolerate concurrent calls.
pub trait CompletionProvider: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError>;
}

impl<P: CompletionProvider + ?Sized> CompletionProvider for &P {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        (**self).complete(request)
    }
}

impl<P: CompletionProvider + ?Sized> CompletionProvider for Box<P> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        (**self).complete(request)
    }
}

impl<P: CompletionProvider + ?Sized> CompletionProvider for Arc<P> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        (**self).complete(request)
    }
}

/// Stable hex SHA-256 of a prompt.
pub fn prompt_hash(prompt: &str) -> String {
    crate::prompts::sha256_hex(prompt)
}

#[cfg(test)]
pub(crate) fn request(call_index: u64, prompt: &str) -> CompletionRequest {
    CompletionRequest {
        model_id: "test-model".into(),
        prompt: prompt.into(),
        sampling: Sampling::default(),
        call_index,
        stage: "test".into(),
    }
}
