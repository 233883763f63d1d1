use std::io::Read;
use std::path::Path;

use serde::Serialize;

use orthoprobe::error::{Error, Result};
use orthoprobe::Span;

use crate::config::RunConfig;
use crate::stage_io::write_jsonl;

#[derive(Serialize)]
struct EncodedLine {
    text: String,
    tokens: Vec<String>,
    ids: Vec<u32>,
    offsets: Vec<Span>,
}

pub fn run(config: &RunConfig, input: Option<&Path>, out: &Path) -> Result<()> {
    let text = match input {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::io("<stdin>", e))?;
            buf
        }
    };
    let tokenizer = config.load_tokenizer()?;
    let lines: Vec<EncodedLine> = text
        .lines()
        .filter(|l| !l.is_empty())
        .map(|line| {
            let seq = tokenizer.encode(line);
            EncodedLine {
                text: line.to_string(),
                tokens: seq.tokens,
                ids: seq.ids,
                offsets: seq.offsets,
            }
        })
        .collect();
    eprintln!("encoded {} lines", lines.len());
    write_jsonl(out, config, &lines)
}
