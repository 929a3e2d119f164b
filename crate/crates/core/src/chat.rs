//! Chat-completion client abstraction.
//!
//! Synthesis and inference talk to a model through [`ChatClient`], a
//! plain request/response interface. [`HttpChatClient`] speaks the
//! OpenAI-compatible `/chat/completions` protocol with retry and
//! timeout; [`StubChatClient`] is the deterministic test double used
//! everywhere the real model is out of reach.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Duration;
use thiserror::Error;

/// A chat turn role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

/// One chat turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: Role::Assistant, content: content.into() }
    }
}

/// Decoding parameters passed through to the backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for DecodeParams {
    fn default() -> Self {
        Self { temperature: 0.0, max_tokens: 1024 }
    }
}

/// What a client can do: model identity and context budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientCapabilities {
    pub model: String,
    pub max_context: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    /// Transport-level failure; callers may retry.
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("endpoint error (status {status}): {message}")]
    Endpoint { status: u16, message: String },
    #[error("client returned empty output")]
    Empty,
}

impl ClientError {
    pub fn is_retryable(&self) -> bool {
        match self {
            ClientError::Transport(_) => true,
            ClientError::Endpoint { status, .. } => *status >= 500,
            ClientError::Empty => false,
        }
    }
}

/// A chat-completion backend.
pub trait ChatClient: Send + Sync {
    fn capabilities(&self) -> ClientCapabilities;
    fn complete(&self, messages: &[ChatMessage], params: &DecodeParams)
        -> Result<String, ClientError>;
}

/// Renders a prompt to one string, used for hashing and stub matching.
pub fn render_transcript(messages: &[ChatMessage]) -> String {
    let mut out = String::new();
    for message in messages {
        out.push_str(message.role.as_str());
        out.push_str(": ");
        out.push_str(&message.content);
        out.push('\n');
    }
    out
}

/// Short hex digest of a prompt, the key for hash-canned stub responses.
pub fn prompt_hash(messages: &[ChatMessage]) -> String {
    let digest = Sha256::digest(render_transcript(messages).as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in &digest[..8] {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// First line of the form `TASK: <kind>` in the last user message, the
/// marker synthesis prompts carry so the stub knows what is being asked.
pub fn task_marker(messages: &[ChatMessage]) -> Option<String> {
    let last_user = messages.iter().rev().find(|m| m.role == Role::User)?;
    let first = last_user.content.lines().next()?;
    first.strip_prefix("TASK: ").map(str::to_string)
}

fn payload_field(messages: &[ChatMessage], key: &str) -> Option<String> {
    let last_user = messages.iter().rev().find(|m| m.role == Role::User)?;
    let prefix = format!("{key}: ");
    last_user
        .content
        .lines()
        .find_map(|line| line.strip_prefix(&prefix))
        .map(str::to_string)
}

/// Lines following a `<KEY>:` block marker, up to the next `ALLCAPS:` marker.
fn payload_block(messages: &[ChatMessage], key: &str) -> Option<String> {
    let last_user = messages.iter().rev().find(|m| m.role == Role::User)?;
    let marker = format!("{key}:");
    let mut collecting = false;
    let mut lines = Vec::new();
    for line in last_user.content.lines() {
        if line == marker {
            collecting = true;
            continue;
        }
        if collecting {
            let is_marker = line.split_once(':').is_some_and(|(key, _)| {
                !key.is_empty() && key.chars().all(|c| c.is_ascii_uppercase() || c == '_')
            });
            if is_marker {
                break;
            }
            lines.push(line);
        }
    }
    if collecting {
        Some(lines.join("\n").trim().to_string())
    } else {
        None
    }
}

/// How the stub answers.
#[derive(Debug, Clone, Default)]
pub enum StubBehavior {
    /// Echo the last user message verbatim.
    Echo,
    /// Fixed responses keyed by task marker or by prompt hash; falls back
    /// to templated output on a miss.
    Canned { by_task: BTreeMap<String, String>, by_hash: BTreeMap<String, String> },
    /// Deterministic templated output derived from the prompt payload.
    #[default]
    Templated,
}

/// Call record kept for prompt-content assertions in tests.
#[derive(Debug, Clone)]
pub struct StubCall {
    pub task: Option<String>,
    pub transcript: String,
}

/// Deterministic test double. Same prompt, same answer, every run.
pub struct StubChatClient {
    behavior: StubBehavior,
    calls: Mutex<Vec<StubCall>>,
}

impl StubChatClient {
    pub fn new(behavior: StubBehavior) -> Self {
        Self { behavior, calls: Mutex::new(Vec::new()) }
    }

    pub fn templated() -> Self {
        Self::new(StubBehavior::Templated)
    }

    pub fn echo() -> Self {
        Self::new(StubBehavior::Echo)
    }

    pub fn canned_by_task(map: BTreeMap<String, String>) -> Self {
        Self::new(StubBehavior::Canned { by_task: map, by_hash: BTreeMap::new() })
    }

    /// All calls made so far, oldest first.
    pub fn calls(&self) -> Vec<StubCall> {
        self.calls.lock().expect("stub call log poisoned").clone()
    }

    fn templated_response(messages: &[ChatMessage]) -> String {
        let task = task_marker(messages).unwrap_or_default();
        let field = |key: &str| payload_field(messages, key).unwrap_or_default();
        match task.as_str() {
            "describe_screen" => match payload_block(messages, "SCREEN") {
                Some(scene) if !scene.is_empty() => {
                    format!("The screen shows the following elements:\n{scene}")
                }
                _ => "The screen shows no interactive elements.".to_string(),
            },
            "reflection" => format!(
                "The previous step expected: {}. The current screen is consistent \
                 with that expectation, so the action achieved its purpose.",
                field("EXPECTATION")
            ),
            "summary" => format!(
                "Working toward \"{}\"; {} steps completed so far. The current \
                 screen is described in the observation above.",
                field("GOAL"),
                field("STEPS")
            ),
            "planning" => format!(
                "To advance \"{}\", the next move is to perform {} on the current screen.",
                field("GOAL"),
                field("ACTION")
            ),
            "tactical" => format!(
                "Execute {} now, grounded on the target identified by the plan.",
                field("ACTION")
            ),
            "expectation" => format!(
                "After {}, the screen should update to reflect the action's effect, \
                 moving the task one step closer to completion.",
                field("ACTION")
            ),
            "refine" => payload_block(messages, "RESPONSE").unwrap_or_default(),
            _ => messages
                .iter()
                .rev()
                .find(|m| m.role == Role::User)
                .map(|m| m.content.clone())
                .unwrap_or_default(),
        }
    }
}

impl ChatClient for StubChatClient {
    fn capabilities(&self) -> ClientCapabilities {
        ClientCapabilities { model: "stub".to_string(), max_context: 32_768 }
    }

    fn complete(
        &self,
        messages: &[ChatMessage],
        _params: &DecodeParams,
    ) -> Result<String, ClientError> {
        let task = task_marker(messages);
        self.calls.lock().expect("stub call log poisoned").push(StubCall {
            task: task.clone(),
            transcript: render_transcript(messages),
        });
        let output = match &self.behavior {
            StubBehavior::Echo => messages
                .iter()
                .rev()
                .find(|m| m.role == Role::User)
                .map(|m| m.content.clone())
                .unwrap_or_default(),
            StubBehavior::Canned { by_task, by_hash } => by_hash
                .get(&prompt_hash(messages))
                .or_else(|| task.as_ref().and_then(|t| by_task.get(t)))
                .cloned()
                .unwrap_or_else(|| Self::templated_response(messages)),
            StubBehavior::Templated => Self::templated_response(messages),
        };
        if output.is_empty() {
            return Err(ClientError::Empty);
        }
        Ok(output)
    }
}

/// OpenAI-compatible HTTP backend with bounded retry.
pub struct HttpChatClient {
    endpoint: String,
    model: String,
    max_context: u32,
    attempts: u32,
    backoff: Duration,
    http: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: Option<String>,
}

impl HttpChatClient {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            max_context: 32_768,
            attempts: 3,
            backoff: Duration::from_millis(250),
            http: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(60))
                .build()
                .expect("default client config is valid"),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.http = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("client config is valid");
        self
    }

    fn request_once(
        &self,
        messages: &[ChatMessage],
        params: &DecodeParams,
    ) -> Result<String, ClientError> {
        let body = CompletionRequest {
            model: &self.model,
            messages,
            temperature: params.temperature,
            max_tokens: params.max_tokens,
        };
        let response = self
            .http
            .post(&self.endpoint)
            .json(&body)
            .send()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            let message = response.text().unwrap_or_default();
            return Err(ClientError::Endpoint { status: status.as_u16(), message });
        }
        let parsed: CompletionResponse = response
            .json()
            .map_err(|e| ClientError::Transport(format!("bad response body: {e}")))?;
        let content = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default();
        if content.is_empty() {
            return Err(ClientError::Empty);
        }
        Ok(content)
    }
}

impl ChatClient for HttpChatClient {
    fn capabilities(&self) -> ClientCapabilities {
        ClientCapabilities { model: self.model.clone(), max_context: self.max_context }
    }

    fn complete(
        &self,
        messages: &[ChatMessage],
        params: &DecodeParams,
    ) -> Result<String, ClientError> {
        let mut last_err = ClientError::Transport("no attempts made".to_string());
        for attempt in 0..self.attempts {
            match self.request_once(messages, params) {
                Ok(output) => return Ok(output),
                Err(err) if err.is_retryable() && attempt + 1 < self.attempts => {
                    log::warn!("chat attempt {} failed, retrying: {err}", attempt + 1);
                    std::thread::sleep(self.backoff * (attempt + 1));
                    last_err = err;
                }
                Err(err) => return Err(err),
            }
        }
        Err(last_err)
    }
}
