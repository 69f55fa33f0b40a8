//! Chat-completion HTTP provider.

use std::fmt;
use std::time::{Duration, Instant};

use connections_core::provider::{CompletionProvider, CompletionRequest, CompletionResponse, ProviderError, Usage};
use serde_json::{json, Value};

pub const API_KEY_ENV: &str = "LLM_API_KEY";

pub struct LiveProvider {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
}

impl fmt::Debug for LiveProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LiveProvider")
            .field("endpoint", &self.endpoint)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl LiveProvider {
    pub fn new(endpoint: &str, timeout: Duration, api_key: Option<String>) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ProviderError::permanent(format!("cannot build HTTP client: {e}")))?;
        Ok(LiveProvider { client, endpoint: endpoint.to_string(), api_key })
    }

    /// Takes the key from `LLM_API_KEY`; requests go out unauthenticated
    /// when it is unset.
    pub fn from_env(endpoint: &str, timeout: Duration) -> Result<Self, ProviderError> {
        Self::new(endpoint, timeout, std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()))
    }
}

pub fn request_body(req: &CompletionRequest) -> Value {
    let mut body = json!({
        "model": req.model_id,
        "messages": [{"role": "user", "content": req.prompt}],
    });
    if let Some(t) = req.sampling.temperature {
        body["temperature"] = json!(t);
    }
    if let Some(n) = req.sampling.max_output_tokens {
        body["max_tokens"] = json!(n);
    }
    body
}

pub fn parse_response(body: &Value) -> Result<(String, Option<Usage>), ProviderError> {
    let text = body
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| ProviderError::permanent("response has no choices[0].message.content"))?;
    let usage = body.get("usage").map(|u| Usage {
        prompt_tokens: u.get("prompt_tokens").and_then(Value::as_u64),
        completion_tokens: u.get("completion_tokens").and_then(Value::as_u64),
    });
    Ok((text.to_string(), usage))
}

fn classify(status: reqwest::StatusCode, body: &str) -> ProviderError {
    let snippet: String = body.chars().take(200).collect();
    let message = format!("HTTP {status}: {snippet}");
    if status.as_u16() == 429 || status.is_server_error() {
        ProviderError::transient(message)
    } else {
        ProviderError::permanent(message)
    }
}

impl CompletionProvider for LiveProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ProviderError> {
        let started = Instant::now();
        let mut http = self.client.post(&self.endpoint).json(&request_body(request));
        if let Some(key) = &self.api_key {
            http = http.bearer_auth(key);
        }
        let response = http.send().map_err(|e| {
            if e.is_timeout() || e.is_connect() || e.is_request() {
                ProviderError::transient(e.to_string())
            } else {
                ProviderError::permanent(e.to_string())
            }
        })?;
        let status = response.status();
        let text = response.text().map_err(|e| ProviderError::transient(e.to_string()))?;
        if !status.is_success() {
            return Err(classify(status, &text));
        }
        let body: Value =
            serde_json::from_str(&text).map_err(|e| ProviderError::permanent(format!("response is not JSON: {e}")))?;
        let (text, usage) = parse_response(&body)?;
        Ok(CompletionResponse { text, usage, latency: started.elapsed() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use connections_core::provider::Sampling;

    fn req(sampling: Sampling) -> CompletionRequest {
        CompletionRequest { model_id: "m".into(), prompt: "p".into(), sampling, call_index: 0, stage: "s".into() }
    }

    #[test]
    fn body_omits_unset_sampling() {
        let b = request_body(&req(Sampling::default()));
        assert_eq!(b, json!({"model": "m", "messages": [{"role": "user", "content": "p"}]}));
        let b = request_body(&req(Sampling { temperature: Some(0.5), max_output_tokens: Some(64) }));
        assert_eq!(b["temperature"], json!(0.5));
        assert_eq!(b["max_tokens"], json!(64));
    }

    #[test]
    fn parses_choices() {
        let body = json!({"choices": [{"message": {"content": "hi"}}], "usage": {"prompt_tokens": 3, "completion_tokens": 1}});
        let (text, usage) = parse_response(&body).unwrap();
        assert_eq!(text, "hi");
        assert_eq!(usage, Some(Usage { prompt_tokens: Some(3), completion_tokens: Some(1) }));
        assert!(parse_response(&json!({"choices": []})).is_err());
    }

    #[test]
    fn status_classes() {
        assert!(classify(reqwest::StatusCode::TOO_MANY_REQUESTS, "").is_transient());
        assert!(classify(reqwest::StatusCode::BAD_GATEWAY, "").is_transient());
        assert!(!classify(reqwest::StatusCode::UNAUTHORIZED, "").is_transient());
    }

    #[test]
    fn debug_hides_key() {
        let p = LiveProvider::new("http://localhost:1", Duration::from_secs(1), Some("secret".into())).unwrap();
        assert!(!format!("{p:?}").contains("secret"));
    }
}
