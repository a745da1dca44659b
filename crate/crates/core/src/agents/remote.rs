//! Chat-completions client with bounded concurrency and retry with backoff.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::{Agent, AgentContext, AgentError};

/// Request dialect used for the thinking switch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provider {
    #[default]
    Openai,
    Gemini,
    Generic,
}

/// Extra request field that turns model-side reasoning on or off.
pub fn thinking_field(provider: Provider, thinking: bool) -> Option<(&'static str, Value)> {
    match (provider, thinking) {
        (Provider::Openai, true) => Some(("reasoning_effort", json!("medium"))),
        (Provider::Openai, false) => None,
        (Provider::Gemini, true) => Some(("reasoning_effort", json!("medium"))),
        (Provider::Gemini, false) => Some(("reasoning_effort", json!("none"))),
        (Provider::Generic, on) => Some(("thinking", json!(on))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteAgentConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub thinking: bool,
    pub provider: Provider,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub timeout_secs: f64,
    pub max_retries: u32,
    pub max_in_flight: usize,
    pub backoff_base_ms: u64,
    pub backoff_max_ms: u64,
}

impl Default for RemoteAgentConfig {
    fn default() -> Self {
        RemoteAgentConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4o".into(),
            temperature: 1.0,
            thinking: false,
            provider: Provider::default(),
            api_key_env: "PINGS_API_KEY".into(),
            timeout_secs: 120.0,
            max_retries: 5,
            max_in_flight: 4,
            backoff_base_ms: 500,
            backoff_max_ms: 30_000,
        }
    }
}

impl RemoteAgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return Err(AgentError::Config("timeout_secs must be positive".into()));
        }
        if self.max_in_flight == 0 {
            return Err(AgentError::Config("max_in_flight must be at least 1".into()));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(AgentError::Config("temperature must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("{0}")]
    Other(String),
}

pub trait Transport: Send + Sync {
    fn post_json(&self, url: &str, bearer: &str, body: &str) -> Result<HttpResponse, TransportError>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        UreqTransport { agent: config.into() }
    }
}

impl Transport for UreqTransport {
    fn post_json(&self, url: &str, bearer: &str, body: &str) -> Result<HttpResponse, TransportError> {
        let sent = self
            .agent
            .post(url)
            .header("Authorization", &format!("Bearer {bearer}"))
            .header("Content-Type", "application/json")
            .send(body);
        match sent {
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                let body = resp
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| TransportError::Other(e.to_string()))?;
                Ok(HttpResponse { status, body })
            }
            Err(ureq::Error::Timeout(_)) => Err(TransportError::Timeout),
            Err(e) => Err(TransportError::Other(e.to_string())),
        }
    }
}

/// Counting semaphore; permits are returned on drop.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn new(n: usize) -> Self {
        Gate {
            free: Mutex::new(n),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

type CredentialSource = Box<dyn Fn(&str) -> Option<String> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteReply {
    pub text: String,
    pub retries: u32,
}

/// A model that maps a prompt to text. The sycophancy judge uses this.
pub trait TextModel: Send + Sync {
    fn complete_text(&self, prompt: &str) -> Result<String, AgentError>;
}

pub struct RemoteClient {
    config: RemoteAgentConfig,
    transport: Box<dyn Transport>,
    gate: Gate,
    credentials: CredentialSource,
}

impl RemoteClient {
    pub fn new(config: RemoteAgentConfig) -> Result<Self, AgentError> {
        let timeout = Duration::from_secs_f64(config.timeout_secs.max(0.001));
        Self::with_transport(config, Box::new(UreqTransport::new(timeout)))
    }

    pub fn with_transport(
        config: RemoteAgentConfig,
        transport: Box<dyn Transport>,
    ) -> Result<Self, AgentError> {
        config.validate()?;
        Ok(RemoteClient {
            gate: Gate::new(config.max_in_flight),
            config,
            transport,
            credentials: Box::new(|name| std::env::var(name).ok()),
        })
    }

    /// Replace the environment lookup used to find the API key.
    pub fn with_credentials(
        mut self,
        source: impl Fn(&str) -> Option<String> + Send + Sync + 'static,
    ) -> Self {
        self.credentials = Box::new(source);
        self
    }

    pub fn config(&self) -> &RemoteAgentConfig {
        &self.config
    }

    pub fn request_body(&self, prompt: &str) -> Value {
        let mut body = json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        });
        if let Some((key, value)) = thinking_field(self.config.provider, self.config.thinking) {
            body[key] = value;
        }
        body
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let base = self.config.backoff_base_ms.saturating_mul(1 << attempt.min(20));
        let capped = base.min(self.config.backoff_max_ms) as f64;
        Duration::from_millis((capped * rand::rng().random_range(0.5..=1.0)) as u64)
    }

    pub fn complete(&self, prompt: &str) -> Result<RemoteReply, AgentError> {
        let key = (self.credentials)(&self.config.api_key_env)
            .filter(|k| !k.is_empty())
            .ok_or_else(|| {
                AgentError::Auth(format!(
                    "environment variable {} is not set",
                    self.config.api_key_env
                ))
            })?;
        let body = self.request_body(prompt).to_string();
        let mut retries = 0;
        loop {
            let result = {
                let _permit = self.gate.acquire();
                self.transport.post_json(&self.config.endpoint, &key, &body)
            };
            let transient = match result {
                Ok(r) if (200..300).contains(&r.status) => {
                    return extract_text(&r.body).map(|text| RemoteReply { text, retries })
                }
                Ok(r) if r.status == 401 || r.status == 403 => {
                    return Err(AgentError::Auth(format!("status {}", r.status)))
                }
                Ok(r) if r.status == 429 => AgentError::RateLimited { retries },
                Ok(r) if r.status >= 500 => AgentError::Server {
                    status: r.status,
                    retries,
                },
                Ok(r) => return Err(AgentError::Transport(format!("status {}: {}", r.status, r.body))),
                Err(TransportError::Timeout) => AgentError::Timeout { retries },
                Err(TransportError::Other(m)) => return Err(AgentError::Transport(m)),
            };
            if retries >= self.config.max_retries {
                return Err(transient);
            }
            log::warn!("{transient}; retrying");
            std::thread::sleep(self.backoff(retries));
            retries += 1;
        }
    }
}

impl TextModel for RemoteClient {
    fn complete_text(&self, prompt: &str) -> Result<String, AgentError> {
        self.complete(prompt).map(|r| r.text)
    }
}

/// The first candidate's message text.
pub fn extract_text(body: &str) -> Result<String, AgentError> {
    let malformed = || AgentError::MalformedResponse {
        body: body.to_string(),
    };
    let v: Value = serde_json::from_str(body).map_err(|_| malformed())?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(malformed)
}

/// Dialogue agent backed by a shared [`RemoteClient`].
pub struct RemoteAgent {
    client: Arc<RemoteClient>,
    retries: AtomicU64,
}

impl RemoteAgent {
    pub fn new(client: Arc<RemoteClient>) -> Self {
        RemoteAgent {
            client,
            retries: AtomicU64::new(0),
        }
    }

    /// Retries spent across every call so far.
    pub fn total_retries(&self) -> u64 {
        self.retries.load(Ordering::Relaxed)
    }
}

impl Agent for RemoteAgent {
    fn id(&self) -> String {
        let c = self.client.config();
        format!("remote:{}{}", c.model, if c.thinking { "+thinking" } else { "" })
    }

    fn next_utterance(&self, ctx: &AgentContext<'_>) -> Result<String, AgentError> {
        let reply = self.client.complete(&ctx.prompt)?;
        self.retries.fetch_add(reply.retries as u64, Ordering::Relaxed);
        Ok(reply.text)
    }
}
