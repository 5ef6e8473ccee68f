//! Chat-completion adapter: `{model, messages, temperature}` in,
//! `choices[0].message.content` out.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};

use super::provider::{sha256_hex, Completion, Provider, ProviderConfig, Task};
use super::RegenError;

const MAX_BACKOFF: Duration = Duration::from_secs(30);

pub struct HttpProvider {
    cfg: ProviderConfig,
    client: Client,
    next_slot: Mutex<Instant>,
    base_backoff: Duration,
}

impl std::fmt::Debug for HttpProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpProvider")
            .field("endpoint", &self.cfg.endpoint)
            .field("model", &self.cfg.model)
            .finish()
    }
}

enum Attempt {
    Done(Completion),
    Retry { error: RegenError, wait: Option<Duration> },
    Fail(RegenError),
}

impl HttpProvider {
    pub fn new(cfg: ProviderConfig) -> Result<Self, RegenError> {
        let client = Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs.max(1)))
            .build()
            .map_err(|e| RegenError::Transport(e.to_string()))?;
        Ok(Self {
            cfg,
            client,
            next_slot: Mutex::new(Instant::now()),
            base_backoff: Duration::from_millis(500),
        })
    }

    /// Shortens retry sleeps; for tests against a local server.
    pub fn with_base_backoff(mut self, base: Duration) -> Self {
        self.base_backoff = base;
        self
    }

    fn credential(&self) -> Result<Option<String>, RegenError> {
        if self.cfg.credential_env.is_empty() {
            return Ok(None);
        }
        std::env::var(&self.cfg.credential_env)
            .map(Some)
            .map_err(|_| RegenError::MissingCredential(self.cfg.credential_env.clone()))
    }

    /// Blocks until the client-side request budget allows another call.
    fn throttle(&self) {
        if self.cfg.requests_per_minute == 0 {
            return;
        }
        let interval = Duration::from_secs(60) / self.cfg.requests_per_minute;
        let wait = {
            let mut slot = self.next_slot.lock().expect("rate limiter poisoned");
            let now = Instant::now();
            let start = (*slot).max(now);
            *slot = start + interval;
            start - now
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }

    fn attempt(&self, body: &Value, prompt_digest: &str, key: Option<&str>) -> Attempt {
        self.throttle();
        let mut req = self.client.post(&self.cfg.endpoint).json(body);
        if let Some(k) = key {
            req = req.bearer_auth(k);
        }
        let resp = match req.send() {
            Ok(r) => r,
            Err(e) if e.is_timeout() => {
                return Attempt::Retry {
                    error: RegenError::ProviderTimeout(self.cfg.timeout_secs),
                    wait: None,
                }
            }
            Err(e) => {
                return Attempt::Retry {
                    error: RegenError::Transport(e.without_url().to_string()),
                    wait: None,
                }
            }
        };
        let status = resp.status();
        let retry_after = resp
            .headers()
            .get(reqwest::header::RETRY_AFTER)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|s| s.is_finite() && *s >= 0.0);
        let text = match resp.text() {
            Ok(t) => t,
            Err(e) => {
                return Attempt::Retry {
                    error: RegenError::Transport(e.without_url().to_string()),
                    wait: None,
                }
            }
        };
        if status == StatusCode::TOO_MANY_REQUESTS {
            return Attempt::Retry {
                error: RegenError::RateLimited { retry_after },
                wait: retry_after.map(|s| Duration::from_secs_f64(s).min(MAX_BACKOFF)),
            };
        }
        if status.is_server_error() {
            return Attempt::Retry {
                error: RegenError::Transport(format!("server returned {status}")),
                wait: None,
            };
        }
        if status.is_client_error() {
            return Attempt::Fail(RegenError::ProviderRefusal(format!("{status}: {}", snippet(&text))));
        }
        let response: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => return Attempt::Fail(RegenError::Transport(format!("bad JSON response: {e}"))),
        };
        match extract(&response) {
            Ok(content) => Attempt::Done(Completion {
                text: content,
                prompt_digest: prompt_digest.to_string(),
                request: body.clone(),
                response,
            }),
            Err(e) => Attempt::Fail(e),
        }
    }
}

fn snippet(text: &str) -> String {
    text.chars().take(200).collect()
}

fn extract(response: &Value) -> Result<String, RegenError> {
    let choice = &response["choices"][0];
    if choice.is_null() {
        return Err(RegenError::EmptyCompletion);
    }
    if choice["finish_reason"] == "content_filter" {
        return Err(RegenError::ProviderRefusal("content_filter".into()));
    }
    if let Some(r) = choice["message"]["refusal"].as_str() {
        return Err(RegenError::ProviderRefusal(snippet(r)));
    }
    let content = choice["message"]["content"]
        .as_str()
        .or_else(|| choice["text"].as_str())
        .unwrap_or("")
        .trim();
    if content.is_empty() {
        return Err(RegenError::EmptyCompletion);
    }
    Ok(content.to_string())
}

impl Provider for HttpProvider {
    fn digest(&self) -> String {
        sha256_hex(&[
            b"http",
            self.cfg.endpoint.as_bytes(),
            self.cfg.model.as_bytes(),
            &self.cfg.temperature.to_le_bytes(),
        ])
    }

    fn complete(&self, task: &Task<'_>) -> Result<Completion, RegenError> {
        let key = self.credential()?;
        let prompt = task.render(&self.cfg);
        let prompt_digest = sha256_hex(&[prompt.as_bytes()]);
        let body = json!({
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "messages": [{ "role": "user", "content": prompt }],
        });
        let mut last = RegenError::EmptyCompletion;
        for attempt in 0..=self.cfg.max_retries {
            match self.attempt(&body, &prompt_digest, key.as_deref()) {
                Attempt::Done(c) => return Ok(c),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry { error, wait } => {
                    log::warn!("provider attempt {} failed: {error}", attempt + 1);
                    last = error;
                    if attempt < self.cfg.max_retries {
                        let backoff = self.base_backoff * 2u32.saturating_pow(attempt);
                        std::thread::sleep(wait.unwrap_or(backoff).min(MAX_BACKOFF));
                    }
                }
            }
        }
        Err(last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::sync::mpsc;

    /// Serves one canned `(status line, extra headers, body)` per connection
    /// and forwards each request body.
    fn serve(responses: Vec<(&'static str, &'static str, String)>) -> (String, mpsc::Receiver<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for (status, headers, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0usize;
                let mut auth = String::new();
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                    if lower.starts_with("authorization:") {
                        auth = line.trim().to_string();
                    }
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                }
                let mut buf = vec![0; len];
                reader.read_exact(&mut buf).unwrap();
                tx.send(format!("{auth}\n{}", String::from_utf8(buf).unwrap())).unwrap();
                write!(
                    stream,
                    "HTTP/1.1 {status}\r\nContent-Type: application/json\r\n{headers}Content-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                )
                .unwrap();
            }
        });
        (url, rx)
    }

    fn ok(content: &str) -> (&'static str, &'static str, String) {
        (
            "200 OK",
            "",
            json!({"choices": [{"message": {"role": "assistant", "content": content}, "finish_reason": "stop"}]})
                .to_string(),
        )
    }

    fn provider(url: String, env: &str) -> HttpProvider {
        HttpProvider::new(ProviderConfig {
            kind: super::super::ProviderKind::Http,
            endpoint: url,
            model: "test-model".into(),
            credential_env: env.into(),
            max_retries: 2,
            ..Default::default()
        })
        .unwrap()
        .with_base_backoff(Duration::from_millis(1))
    }

    #[test]
    fn sends_chat_request_and_reads_content() {
        std::env::set_var("STYLESEG_HTTP_KEY_A", "secret-a");
        let (url, rx) = serve(vec![ok("rewritten text")]);
        let p = provider(url, "STYLESEG_HTTP_KEY_A");
        let c = p.complete(&Task::Rewrite { text: "original" }).unwrap();
        assert_eq!(c.text, "rewritten text");
        let seen = rx.recv().unwrap();
        let (auth, body) = seen.split_once('\n').unwrap();
        assert_eq!(auth, "authorization: Bearer secret-a");
        let body: Value = serde_json::from_str(body).unwrap();
        assert_eq!(body["model"], "test-model");
        assert_eq!(body["messages"][0]["role"], "user");
        assert!(body["messages"][0]["content"].as_str().unwrap().ends_with("original"));
        assert!(!c.request.to_string().contains("secret-a"));
    }

    #[test]
    fn retries_rate_limit_then_succeeds() {
        let (url, _rx) = serve(vec![
            ("429 Too Many Requests", "Retry-After: 0\r\n", "{}".into()),
            ("503 Service Unavailable", "", "{}".into()),
            ok("done"),
        ]);
        let p = provider(url, "");
        assert_eq!(p.complete(&Task::Rewrite { text: "x" }).unwrap().text, "done");
    }

    #[test]
    fn persistent_rate_limit_reports_retry_after() {
        let r = ("429 Too Many Requests", "Retry-After: 0\r\n", "{}".to_string());
        let (url, _rx) = serve(vec![r.clone(), r.clone(), r]);
        let err = provider(url, "").complete(&Task::Rewrite { text: "x" }).unwrap_err();
        assert_eq!(err, RegenError::RateLimited { retry_after: Some(0.0) });
    }

    #[test]
    fn refusals_and_empty_completions() {
        let filtered = json!({"choices": [{"message": {"content": ""}, "finish_reason": "content_filter"}]});
        let (url, _rx) = serve(vec![
            ("400 Bad Request", "", "{\"error\":\"nope\"}".into()),
            ("200 OK", "", filtered.to_string()),
            ok("   "),
        ]);
        let p = provider(url, "");
        let t = Task::Rewrite { text: "x" };
        assert!(matches!(p.complete(&t), Err(RegenError::ProviderRefusal(_))));
        assert!(matches!(p.complete(&t), Err(RegenError::ProviderRefusal(_))));
        assert_eq!(p.complete(&t).unwrap_err(), RegenError::EmptyCompletion);
    }

    #[test]
    fn timeout_is_reported() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/", listener.local_addr().unwrap());
        std::thread::spawn(move || {
            let _held: Vec<_> = listener.incoming().take(2).collect();
            std::thread::sleep(Duration::from_secs(5));
        });
        let p = HttpProvider::new(ProviderConfig {
            endpoint: url,
            credential_env: String::new(),
            timeout_secs: 1,
            max_retries: 1,
            ..Default::default()
        })
        .unwrap()
        .with_base_backoff(Duration::from_millis(1));
        assert_eq!(
            p.complete(&Task::Rewrite { text: "x" }).unwrap_err(),
            RegenError::ProviderTimeout(1)
        );
    }

    #[test]
    fn missing_credential_fails_before_any_request() {
        let p = provider("http://127.0.0.1:9/".into(), "STYLESEG_HTTP_KEY_UNSET");
        assert_eq!(
            p.complete(&Task::Rewrite { text: "x" }).unwrap_err(),
            RegenError::MissingCredential("STYLESEG_HTTP_KEY_UNSET".into())
        );
    }
}
