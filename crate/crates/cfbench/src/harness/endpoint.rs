//! Chat-completions HTTP adapter: interleaved text and base64 PNG data URLs,
//! bearer token from an environment variable.

use std::time::{Duration, Instant};

use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Capabilities, Completion, Message, ModelAdapter, Role, TrialContext};
use crate::error::{bail, Error, Result};
use crate::prompts::Part;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    pub model: String,
    pub url: String,
    /// Name of the environment variable holding the bearer token.
    pub auth_env: String,
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub reasoning_effort: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_images")]
    pub max_images: usize,
}

fn default_timeout() -> u64 {
    300
}

fn default_max_images() -> usize {
    8
}

pub struct EndpointAdapter {
    cfg: EndpointConfig,
    token: String,
    agent: ureq::Agent,
}

impl EndpointAdapter {
    /// Fails up front when the token variable is unset or empty.
    pub fn new(cfg: EndpointConfig) -> Result<EndpointAdapter> {
        let token = std::env::var(&cfg.auth_env).unwrap_or_default();
        if token.trim().is_empty() {
            bail!(
                Environment,
                "auth token variable {} is not set",
                cfg.auth_env
            );
        }
        if !cfg.url.starts_with("http://") && !cfg.url.starts_with("https://") {
            bail!(Config, "endpoint url must be http(s): {}", cfg.url);
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(EndpointAdapter { cfg, token, agent })
    }

    fn request_body(&self, conversation: &[Message]) -> Result<Value> {
        let mut messages = Vec::new();
        for m in conversation {
            let role = match m.role {
                Role::User => "user",
                Role::Assistant => "assistant",
            };
            let mut content = Vec::new();
            for p in &m.parts {
                match p {
                    Part::Text(t) => content.push(json!({"type": "text", "text": t})),
                    Part::Image(path) => {
                        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
                        let b64 = base64::engine::general_purpose::STANDARD.encode(bytes);
                        content.push(json!({
                            "type": "image_url",
                            "image_url": {"url": format!("data:image/png;base64,{b64}")}
                        }));
                    }
                }
            }
            messages.push(json!({"role": role, "content": content}));
        }
        let mut body = json!({"model": self.cfg.model, "messages": messages});
        if let Some(t) = self.cfg.temperature {
            body["temperature"] = json!(t);
        }
        if let Some(r) = &self.cfg.reasoning_effort {
            body["reasoning_effort"] = json!(r);
        }
        Ok(body)
    }
}

/// Reply text and reasoning-token count from a chat-completions response.
pub fn parse_response(body: &str) -> Result<(String, Option<u64>)> {
    let v: Value = serde_json::from_str(body).map_err(|e| Error::json("endpoint response", e))?;
    let content = &v["choices"][0]["message"]["content"];
    let text = match content {
        Value::String(s) => s.clone(),
        // Some servers return content parts.
        Value::Array(parts) => parts
            .iter()
            .filter_map(|p| p["text"].as_str())
            .collect::<Vec<_>>()
            .join(""),
        _ => bail!(Validation, "endpoint response has no message content"),
    };
    let tokens = v["usage"]["completion_tokens_details"]["reasoning_tokens"].as_u64();
    Ok((text, tokens))
}

impl ModelAdapter for EndpointAdapter {
    fn id(&self) -> String {
        self.cfg.model.clone()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            max_images: self.cfg.max_images,
            multi_turn: true,
        }
    }

    fn complete(&self, _trial: &TrialContext<'_>, conversation: &[Message]) -> Result<Completion> {
        let body = self.request_body(conversation)?.to_string();
        let started = Instant::now();
        let mut resp = self
            .agent
            .post(&self.cfg.url)
            .header("Authorization", &format!("Bearer {}", self.token))
            .header("Content-Type", "application/json")
            .send(body.as_str())
            .map_err(|e| Error::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Transport(e.to_string()))?;
        let latency_ms = started.elapsed().as_millis() as u64;
        match status {
            200..=299 => {}
            // Rate limits and server errors are worth retrying.
            429 | 500..=599 => bail!(Transport, "HTTP {status}: {}", truncate(&text)),
            _ => bail!(Validation, "HTTP {status}: {}", truncate(&text)),
        }
        let (reply, reasoning_tokens) = parse_response(&text)?;
        Ok(Completion {
            text: reply,
            latency_ms: Some(latency_ms),
            reasoning_tokens,
        })
    }
}

fn truncate(s: &str) -> &str {
    match s.char_indices().nth(200) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_shapes() {
        let body = r#"{"choices":[{"message":{"content":"I see {5}"}}],"usage":{"completion_tokens_details":{"reasoning_tokens":321}}}"#;
        assert_eq!(
            parse_response(body).unwrap(),
            ("I see {5}".to_string(), Some(321))
        );
        let parts = r#"{"choices":[{"message":{"content":[{"type":"text","text":"{No}"}]}}]}"#;
        assert_eq!(parse_response(parts).unwrap(), ("{No}".to_string(), None));
        assert!(parse_response(r#"{"choices":[]}"#).is_err());
    }

    #[test]
    fn missing_token_is_startup_error() {
        let cfg = EndpointConfig {
            model: "m".into(),
            url: "http://127.0.0.1:9".into(),
            auth_env: "CFBENCH_TEST_SURELY_UNSET_TOKEN".into(),
            temperature: None,
            reasoning_effort: None,
            timeout_secs: 1,
            max_images: 4,
        };
        assert!(matches!(
            EndpointAdapter::new(cfg),
            Err(Error::Environment(_))
        ));
    }
}
