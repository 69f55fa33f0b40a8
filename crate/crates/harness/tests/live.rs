use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use connections_core::provider::{
    CompletionProvider, CompletionRequest, ProviderError, RetryPolicy, RetryingProvider, Sampling,
};
use connections_harness::live::LiveProvider;

struct Captured {
    head: String,
    body: String,
}

/// Serves the canned `(status, body)` replies in order, one per connection.
fn serve(replies: Vec<(u16, String)>) -> (String, JoinHandle<Vec<Captured>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let handle = std::thread::spawn(move || {
        let mut seen = Vec::new();
        for (status, body) in replies {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut head = String::new();
            let mut length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                head.push_str(&line);
            }
            let mut buf = vec![0; length];
            reader.read_exact(&mut buf).unwrap();
            seen.push(Captured { head, body: String::from_utf8(buf).unwrap() });
            let mut stream = reader.into_inner();
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
        seen
    });
    (url, handle)
}

fn ok_body(text: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": text}}],
        "usage": {"prompt_tokens": 12, "completion_tokens": 4}
    })
    .to_string()
}

fn request() -> CompletionRequest {
    CompletionRequest {
        model_id: "gpt-4o".into(),
        prompt: "Puzzle words: A, B".into(),
        sampling: Sampling { temperature: Some(0.0), max_output_tokens: None },
        call_index: 0,
        stage: "vanilla.make_guess".into(),
    }
}

fn no_sleep(policy: RetryPolicy, inner: LiveProvider) -> (RetryingProvider<LiveProvider>, Arc<Mutex<Vec<Duration>>>) {
    let slept = Arc::new(Mutex::new(Vec::new()));
    let log = slept.clone();
    (RetryingProvider::with_sleeper(inner, policy, Arc::new(move |d| log.lock().unwrap().push(d))), slept)
}

#[test]
fn success_sends_chat_body_and_key() {
    let (url, server) = serve(vec![(200, ok_body("FLUB, GAFFE, GOOF, BOO-BOO"))]);
    let p = LiveProvider::new(&url, Duration::from_secs(10), Some("k-123".into())).unwrap();
    let r = p.complete(&request()).unwrap();
    assert_eq!(r.text, "FLUB, GAFFE, GOOF, BOO-BOO");
    assert_eq!(r.usage.unwrap().completion_tokens, Some(4));
    let seen = server.join().unwrap();
    assert!(seen[0].head.starts_with("POST /v1/chat/completions"));
    assert!(seen[0].head.to_ascii_lowercase().contains("authorization: bearer k-123"));
    let body: serde_json::Value = serde_json::from_str(&seen[0].body).unwrap();
    assert_eq!(body["model"], "gpt-4o");
    assert_eq!(body["messages"][0]["content"], "Puzzle words: A, B");
    assert_eq!(body["temperature"], 0.0);
    assert!(body.get("max_tokens").is_none());
}

#[test]
fn no_key_means_no_auth_header() {
    let (url, server) = serve(vec![(200, ok_body("x"))]);
    let p = LiveProvider::new(&url, Duration::from_secs(10), None).unwrap();
    p.complete(&request()).unwrap();
    let seen = server.join().unwrap();
    assert!(!seen[0].head.to_ascii_lowercase().contains("authorization"));
}

#[test]
fn rate_limit_is_retried() {
    let (url, server) = serve(vec![(429, "{\"error\":\"slow down\"}".into()), (200, ok_body("done"))]);
    let live = LiveProvider::new(&url, Duration::from_secs(10), None).unwrap();
    let (p, slept) = no_sleep(RetryPolicy::default(), live);
    assert_eq!(p.complete(&request()).unwrap().text, "done");
    assert_eq!(server.join().unwrap().len(), 2);
    assert_eq!(*slept.lock().unwrap(), [Duration::from_millis(500)]);
}

#[test]
fn unauthorized_is_permanent() {
    let (url, server) = serve(vec![(401, "{\"error\":\"bad key\"}".into())]);
    let live = LiveProvider::new(&url, Duration::from_secs(10), Some("wrong".into())).unwrap();
    let (p, slept) = no_sleep(RetryPolicy::default(), live);
    let err = p.complete(&request()).unwrap_err();
    assert!(matches!(&err, ProviderError::Permanent { message } if message.contains("401")), "{err:?}");
    assert_eq!(server.join().unwrap().len(), 1);
    assert!(slept.lock().unwrap().is_empty());
}

#[test]
fn server_errors_exhaust_retries() {
    let policy = RetryPolicy { max_attempts: 3, ..RetryPolicy::default() };
    let (url, server) = serve(vec![(503, "{}".into()); 3]);
    let live = LiveProvider::new(&url, Duration::from_secs(10), None).unwrap();
    let (p, slept) = no_sleep(policy, live);
    let err = p.complete(&request()).unwrap_err();
    assert!(matches!(err, ProviderError::ExhaustedRetries { attempts: 3, .. }), "{err:?}");
    assert_eq!(server.join().unwrap().len(), 3);
    assert_eq!(*slept.lock().unwrap(), [Duration::from_millis(500), Duration::from_millis(1000)]);
}

#[test]
fn refused_connection_is_transient() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let p = LiveProvider::new(&format!("http://127.0.0.1:{port}/"), Duration::from_secs(2), None).unwrap();
    assert!(p.complete(&request()).unwrap_err().is_transient());
}
