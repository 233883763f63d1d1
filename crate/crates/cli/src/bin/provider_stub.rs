//! Minimal embedding provider speaking the wire protocol, for testing the
//! `exec:` and `http:` transports without model weights.
//!
//! Requests are `{"id": str, "text": str}`; responses are
//! `{"id": str, "dim": int, "vectors": [[f64,...],...], "offsets": [[s,e],...]}`
//! with char-unit offsets.
//!
//! Default behavior: one vector per whitespace token, deterministic values
//! derived from the token bytes. With `--fixture FILE`, every response
//! carries the file's `dim`/`vectors`/`offsets` verbatim (id still echoed).
//! With `--http ADDR` it serves HTTP POST instead of stdin/stdout lines.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Deserialize)]
struct Request {
    id: String,
    text: String,
}

#[derive(Serialize, Deserialize, Clone)]
struct Fixture {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    offsets: Vec<(usize, usize)>,
}

fn token_vector(token: &str, dim: usize) -> Vec<f64> {
    // FNV-1a, then a simple splitmix-style expansion per component
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in token.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    (0..dim)
        .map(|i| {
            let mut x = h ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            x ^= x >> 30;
            x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
            x ^= x >> 27;
            (x as f64 / u64::MAX as f64) * 2.0 - 1.0
        })
        .collect()
}

fn respond(request: &Request, fixture: Option<&Fixture>) -> Value {
    match fixture {
        Some(f) => serde_json::json!({
            "id": request.id,
            "dim": f.dim,
            "vectors": f.vectors,
            "offsets": f.offsets,
        }),
        None => {
            let dim = 8;
            let mut vectors = Vec::new();
            let mut offsets = Vec::new();
            let mut char_pos = 0;
            for chunk in request.text.split_inclusive(char::is_whitespace) {
                let token = chunk.trim_end_matches(char::is_whitespace);
                let chars = token.chars().count();
                if chars > 0 {
                    vectors.push(token_vector(token, dim));
                    offsets.push((char_pos, char_pos + chars));
                }
                char_pos += chunk.chars().count();
            }
            if vectors.is_empty() {
                vectors.push(token_vector("", dim));
                offsets.push((0, 0));
            }
            serde_json::json!({
                "id": request.id,
                "dim": dim,
                "vectors": vectors,
                "offsets": offsets,
            })
        }
    }
}

fn serve_stdio(fixture: Option<Fixture>) {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        if line.trim().is_empty() {
            continue;
        }
        let request: Request = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("provider-stub: bad request: {e}");
                continue;
            }
        };
        let response = respond(&request, fixture.as_ref());
        writeln!(out, "{response}").and_then(|()| out.flush()).expect("stdout write");
    }
}

fn serve_http(addr: &str, fixture: Option<Fixture>) {
    let listener = TcpListener::bind(addr).expect("bind");
    eprintln!("provider-stub: listening on {}", listener.local_addr().unwrap());
    for stream in listener.incoming() {
        let Ok(mut stream) = stream else { continue };
        // read headers
        let mut reader = BufReader::new(stream.try_clone().expect("clone stream"));
        let mut content_length = 0usize;
        loop {
            let mut line = String::new();
            if reader.read_line(&mut line).unwrap_or(0) == 0 {
                break;
            }
            let trimmed = line.trim();
            if trimmed.is_empty() {
                break;
            }
            if let Some(v) = trimmed
                .to_ascii_lowercase()
                .strip_prefix("content-length:")
                .map(str::trim)
            {
                content_length = v.parse().unwrap_or(0);
            }
        }
        let mut body = vec![0u8; content_length];
        if reader.read_exact(&mut body).is_err() {
            continue;
        }
        let reply = match serde_json::from_slice::<Request>(&body) {
            Ok(request) => {
                let response = respond(&request, fixture.as_ref());
                let body = response.to_string();
                format!(
                    "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                    body.len(),
                    body
                )
            }
            Err(e) => {
                let msg = format!("bad request: {e}");
                format!(
                    "HTTP/1.1 400 Bad Request\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                    msg.len(),
                    msg
                )
            }
        };
        let _ = stream.write_all(reply.as_bytes());
    }
}

fn main() {
    let mut args = std::env::args().skip(1);
    let mut http: Option<String> = None;
    let mut fixture: Option<Fixture> = None;
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--http" => http = Some(args.next().expect("--http needs an address")),
            "--fixture" => {
                let path = args.next().expect("--fixture needs a file");
                let text = std::fs::read_to_string(&path).expect("read fixture");
                fixture = Some(serde_json::from_str(&text).expect("parse fixture"));
            }
            other => {
                eprintln!("provider-stub: unknown argument {other:?}");
                std::process::exit(1);
            }
        }
    }
    match http {
        Some(addr) => serve_http(&addr, fixture),
        None => serve_stdio(fixture),
    }
}
