use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{CompletionProvider, CompletionRequest, CompletionResponse, ProviderError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_delay_ms: u64,
    pub multiplier: f64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 5, initial_delay_ms: 500, multiplier: 2.0, max_delay_ms: 30_000 }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based).
    pub fn delay(&self, retry: u32) -> Duration {
        let ms = self.initial_delay_ms as f64 * self.multiplier.powi(retry.saturating_sub(1) as i32);
        Duration::from_millis(ms.min(self.max_delay_ms as f64) as u64)
    }
}

type Sleeper = Arc<dyn Fn(Duration) + Send + Sync>;

/// Retries transient failures with exponential backoff.
pub struct RetryingProvider<P> {
    inner: P,
    policy: RetryPolicy,
    sleep: Sleeper,
}

impl<P> RetryingProvider<P> {
    pub fn new(inner: P, policy: RetryPolicy) -> Self {
        Self::with_sleeper(inner, policy, Arc::new(std::thread::sleep))
    }

    pub fn with_sleeper(inner: P, policy: RetryPolicy, sleep: Sleeper) -> Self {
        RetryingProvider { inner, policy: RetryPolicy { max_attempts: policy.max_attempts.max(1), ..policy }, sleep }
    }
}

impl<P: CompletionProvider> CompletionProvider for RetryingProvider<P> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.inner.complete(request) {
                Err(e) if e.is_transient() => {
                    if attempt >= self.policy.max_attempts {
                        return Err(ProviderError::ExhaustedRetries { attempts: attempt, last: Box::new(e) });
                    }
                    (self.sleep)(self.policy.delay(attempt));
                }
                other => return other,
            }
        }
    }
}
