//! The HTTP adapter against a scripted local server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use base64::Engine;
use cfbench::harness::{run_trial, EndpointAdapter, EndpointConfig, RetryPolicy, TrialStatus};
use cfbench::prompts::{Part, PromptBundle, PromptMode, QuestionId, Turn, TurnPurpose};
use cfbench::scene::RasterImage;
use cfbench::{Answer, AnswerKind, Task, Truth, VariantKind};
use serde_json::Value;

struct Seen {
    auth: Option<String>,
    body: Value,
}

/// Serves one scripted (status, body) reply per connection, then stops.
fn serve(script: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<Seen>>>, JoinHandle<()>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    let handle = std::thread::spawn(move || {
        for (status, reply) in script {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let (mut len, mut auth) = (0usize, None);
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                if let Some((k, v)) = line.split_once(':') {
                    match k.to_ascii_lowercase().as_str() {
                        "content-length" => len = v.trim().parse().unwrap(),
                        "authorization" => auth = Some(v.trim().to_string()),
                        _ => {}
                    }
                }
            }
            let mut body = vec![0u8; len];
            reader.read_exact(&mut body).unwrap();
            log.lock().unwrap().push(Seen {
                auth,
                body: serde_json::from_slice(&body).unwrap(),
            });
            let mut stream = reader.into_inner();
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                reply.len()
            )
            .unwrap();
        }
    });
    (url, seen, handle)
}

fn reply(text: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": text}}],
        "usage": {"completion_tokens_details": {"reasoning_tokens": 42}}
    })
    .to_string()
}

fn adapter(url: &str, env: &str) -> EndpointAdapter {
    std::env::set_var(env, "sk-test-123");
    EndpointAdapter::new(EndpointConfig {
        model: "test-model".into(),
        url: url.into(),
        auth_env: env.into(),
        temperature: Some(1.0),
        reasoning_effort: None,
        timeout_secs: 10,
        max_images: 4,
    })
    .unwrap()
}

fn bundle(image: &str, turns: &[TurnPurpose]) -> PromptBundle {
    PromptBundle {
        id: "x|Q1|baseline".into(),
        item: "x".into(),
        item_id: "x".into(),
        task: Task::Grids,
        variant: VariantKind::Baseline,
        resolution: 384,
        question: QuestionId::Q1,
        mode: PromptMode::baseline(),
        turns: turns
            .iter()
            .enumerate()
            .map(|(i, &purpose)| Turn {
                purpose,
                parts: if i == 0 {
                    vec![Part::Image(image.into()), Part::Text("How many?".into())]
                } else {
                    vec![Part::Text("Check again.".into())]
                },
            })
            .collect(),
        expected_kind: AnswerKind::Integer,
        truth: Some(Truth::count(5, 4)),
    }
}

fn policy(max_retries: u32) -> RetryPolicy {
    RetryPolicy {
        max_retries,
        base_delay_ms: 1,
        max_delay_ms: 5,
    }
}

fn png(dir: &std::path::Path) -> Vec<u8> {
    let img = RasterImage::new(2, 2, vec![255; 16]).unwrap();
    img.write_png(&dir.join("img.png")).unwrap();
    std::fs::read(dir.join("img.png")).unwrap()
}

#[test]
fn rate_limit_is_retried_and_request_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = png(dir.path());
    let (url, seen, h) = serve(vec![
        (429, "{\"error\":\"slow down\"}".into()),
        (200, reply("I count {5}")),
    ]);
    let a = adapter(&url, "CFBENCH_ENDPOINT_TEST_A");
    let b = bundle("img.png", &[TurnPurpose::Question]);
    let rec = run_trial(&b, &a, "test-model", 0, dir.path(), &policy(3));
    h.join().unwrap();

    assert_eq!(rec.status, TrialStatus::Ok, "{:?}", rec.error);
    assert_eq!(rec.parsed, Some(Answer::Int(5)));
    assert!(rec.correct);
    assert_eq!(rec.reasoning_tokens, Some(42));

    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 2);
    let req = &seen[1];
    assert_eq!(req.auth.as_deref(), Some("Bearer sk-test-123"));
    assert_eq!(req.body["model"], "test-model");
    assert_eq!(req.body["temperature"], 1.0);
    let content = &req.body["messages"][0]["content"];
    assert_eq!(content[0]["type"], "image_url");
    let data = content[0]["image_url"]["url"].as_str().unwrap();
    let b64 = data.strip_prefix("data:image/png;base64,").unwrap();
    assert_eq!(
        base64::engine::general_purpose::STANDARD.decode(b64).unwrap(),
        bytes
    );
    assert_eq!(content[1], serde_json::json!({"type": "text", "text": "How many?"}));
}

#[test]
fn client_error_fails_without_retry() {
    let dir = tempfile::tempdir().unwrap();
    png(dir.path());
    let (url, seen, h) = serve(vec![(400, "{\"error\":\"bad request\"}".into())]);
    let a = adapter(&url, "CFBENCH_ENDPOINT_TEST_B");
    let b = bundle("img.png", &[TurnPurpose::Question]);
    let rec = run_trial(&b, &a, "test-model", 0, dir.path(), &policy(3));
    h.join().unwrap();
    assert_eq!(rec.status, TrialStatus::TransportFailed);
    assert!(rec.error.unwrap().contains("400"));
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn server_errors_exhaust_retries() {
    let dir = tempfile::tempdir().unwrap();
    png(dir.path());
    let (url, seen, h) = serve(vec![(503, "{}".into()); 3]);
    let a = adapter(&url, "CFBENCH_ENDPOINT_TEST_C");
    let b = bundle("img.png", &[TurnPurpose::Question]);
    let rec = run_trial(&b, &a, "test-model", 0, dir.path(), &policy(2));
    h.join().unwrap();
    assert_eq!(rec.status, TrialStatus::TransportFailed);
    assert!(!rec.correct && rec.parsed.is_none());
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn follow_up_turn_carries_the_conversation() {
    let dir = tempfile::tempdir().unwrap();
    png(dir.path());
    let (url, seen, h) = serve(vec![
        (200, reply("{4}")),
        (200, reply("Rechecked: {5}")),
    ]);
    let a = adapter(&url, "CFBENCH_ENDPOINT_TEST_D");
    let b = bundle("img.png", &[TurnPurpose::Question, TurnPurpose::DoubleCheck]);
    let rec = run_trial(&b, &a, "test-model", 0, dir.path(), &policy(0));
    h.join().unwrap();
    assert_eq!(rec.responses, vec!["{4}", "Rechecked: {5}"]);
    assert_eq!(rec.parsed, Some(Answer::Int(5)));
    assert_eq!(rec.reasoning_tokens, Some(84));
    let seen = seen.lock().unwrap();
    let msgs = seen[1].body["messages"].as_array().unwrap();
    assert_eq!(msgs.len(), 3);
    assert_eq!(msgs[1]["role"], "assistant");
    assert_eq!(msgs[1]["content"][0]["text"], "{4}");
    assert_eq!(msgs[2]["content"][0]["text"], "Check again.");
}
