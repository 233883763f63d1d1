//! Wire-protocol providers: JSON over HTTP POST, or newline-delimited JSON
//! on a subprocess's standard input/output.
//!
//! Both speak the same schema (see [`ProviderRequest`] / ProviderResponse):
//! every response must echo the request id, declare a dimension matching
//! each vector's length, and carry one char-unit offset pair per vector,
//! all within the input text.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::Span;

use super::{EmbeddingProvider, HiddenStateMatrix, ProviderRequest, ProviderResponse};

const HTTP_TIMEOUT: Duration = Duration::from_secs(120);

fn validate(
    request: &ProviderRequest,
    response: ProviderResponse,
) -> Result<HiddenStateMatrix> {
    if response.id != request.id {
        return Err(Error::Protocol(format!(
            "response id {:?} does not echo request id {:?}",
            response.id, request.id
        )));
    }
    if response.vectors.len() != response.offsets.len() {
        return Err(Error::Protocol(format!(
            "{} vectors but {} offsets",
            response.vectors.len(),
            response.offsets.len()
        )));
    }
    for v in &response.vectors {
        if v.len() != response.dim {
            return Err(Error::Protocol(format!(
                "vector of length {} does not match declared dim {}",
                v.len(),
                response.dim
            )));
        }
    }
    let text_chars = request.text.chars().count();
    let mut offsets = Vec::with_capacity(response.offsets.len());
    for &(start, end) in &response.offsets {
        if start > end || end > text_chars {
            return Err(Error::Protocol(format!(
                "offset [{start}, {end}) lies outside the {text_chars}-char text"
            )));
        }
        offsets.push(Span::new(start, end));
    }
    HiddenStateMatrix::new(response.vectors, offsets)
}

// ============================================================================
// HTTP
// ============================================================================

pub struct HttpProvider {
    url: String,
    client: reqwest::blocking::Client,
    next_id: AtomicU64,
    tag: String,
}

impl HttpProvider {
    pub fn new(url: &str) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(HTTP_TIMEOUT)
            .build()
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(HttpProvider {
            url: url.to_string(),
            client,
            next_id: AtomicU64::new(0),
            tag: format!("http:{url}"),
        })
    }
}

impl EmbeddingProvider for HttpProvider {
    fn embed(&self, text: &str) -> Result<HiddenStateMatrix> {
        let request = ProviderRequest {
            id: format!("r{}", self.next_id.fetch_add(1, Ordering::Relaxed)),
            text: text.to_string(),
        };
        let http_response = self
            .client
            .post(&self.url)
            .json(&request)
            .send()
            .map_err(|e| Error::Transport(e.to_string()))?;
        if !http_response.status().is_success() {
            return Err(Error::Transport(format!(
                "provider returned HTTP {}",
                http_response.status()
            )));
        }
        let response: ProviderResponse = http_response
            .json()
            .map_err(|e| Error::Protocol(format!("malformed response body: {e}")))?;
        validate(&request, response)
    }

    fn tag(&self) -> &str {
        &self.tag
    }
}

// ============================================================================
// Subprocess
// ============================================================================

struct ExecChannel {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

pub struct ExecProvider {
    command: Vec<String>,
    channel: Mutex<Option<ExecChannel>>,
    next_id: AtomicU64,
    tag: String,
}

impl ExecProvider {
    /// `command` is whitespace-split into program and arguments.
    pub fn new(command: &str) -> Result<Self> {
        let parts: Vec<String> = command.split_whitespace().map(str::to_string).collect();
        if parts.is_empty() {
            return Err(Error::Config("exec provider command is empty".into()));
        }
        Ok(ExecProvider {
            tag: format!("exec:{}", parts[0]),
            command: parts,
            channel: Mutex::new(None),
            next_id: AtomicU64::new(0),
        })
    }

    fn spawn(&self) -> Result<ExecChannel> {
        let mut child = Command::new(&self.command[0])
            .args(&self.command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Transport(format!("failed to spawn provider: {e}")))?;
        let stdin = child
            .stdin
            .take()
            .ok_or_else(|| Error::Transport("provider stdin unavailable".into()))?;
        let stdout = child
            .stdout
            .take()
            .map(BufReader::new)
            .ok_or_else(|| Error::Transport("provider stdout unavailable".into()))?;
        Ok(ExecChannel {
            child,
            stdin,
            stdout,
        })
    }

    fn round_trip(&self, request: &ProviderRequest) -> Result<ProviderResponse> {
        let mut guard = self
            .channel
            .lock()
            .map_err(|_| Error::Transport("provider channel poisoned".into()))?;
        if guard.is_none() {
            *guard = Some(self.spawn()?);
        }
        let channel = guard.as_mut().expect("just spawned");
        let outcome = (|| -> Result<ProviderResponse> {
            let mut line = serde_json::to_string(request)
                .map_err(|e| Error::Protocol(e.to_string()))?;
            line.push('\n');
            channel
                .stdin
                .write_all(line.as_bytes())
                .and_then(|_| channel.stdin.flush())
                .map_err(|e| Error::Transport(format!("provider write failed: {e}")))?;
            let mut reply = String::new();
            let n = channel
                .stdout
                .read_line(&mut reply)
                .map_err(|e| Error::Transport(format!("provider read failed: {e}")))?;
            if n == 0 {
                return Err(Error::Transport("provider closed its output".into()));
            }
            serde_json::from_str(&reply)
                .map_err(|e| Error::Protocol(format!("malformed response line: {e}")))
        })();
        if matches!(outcome, Err(Error::Transport(_))) {
            // drop the broken child; the next call respawns
            if let Some(mut dead) = guard.take() {
                let _ = dead.child.kill();
                let _ = dead.child.wait();
            }
        }
        outcome
    }
}

impl EmbeddingProvider for ExecProvider {
    fn embed(&self, text: &str) -> Result<HiddenStateMatrix> {
        let request = ProviderRequest {
            id: format!("r{}", self.next_id.fetch_add(1, Ordering::Relaxed)),
            text: text.to_string(),
        };
        let response = self.round_trip(&request)?;
        validate(&request, response)
    }

    fn max_in_flight(&self) -> Option<usize> {
        Some(1)
    }

    fn tag(&self) -> &str {
        &self.tag
    }
}

impl Drop for ExecProvider {
    fn drop(&mut self) {
        if let Ok(mut guard) = self.channel.lock() {
            if let Some(mut channel) = guard.take() {
                let _ = channel.child.kill();
                let _ = channel.child.wait();
            }
        }
    }
}
