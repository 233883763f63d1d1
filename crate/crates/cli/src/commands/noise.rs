use std::path::Path;

use orthoprobe::corpus::VocabEntry;
use orthoprobe::error::{Error, Result};
use orthoprobe::noiser::{derive_seed, noise_word};

use crate::config::RunConfig;
use crate::stage_io::{read_jsonl, write_jsonl};

fn noisable(word: &str) -> bool {
    word.len() >= 4 && word.bytes().all(|b| b.is_ascii_alphabetic())
}

pub fn run(config: &RunConfig, vocab_path: &Path, out: &Path) -> Result<()> {
    let vocab: Vec<VocabEntry> = read_jsonl(vocab_path)?;
    let mut pairs = Vec::with_capacity(vocab.len());
    let mut skipped = 0usize;
    for entry in &vocab {
        // same-case letter swaps are defined over [A-Za-z]; words outside
        // that alphabet are reported and skipped
        if !noisable(&entry.word) {
            skipped += 1;
            continue;
        }
        let seed = derive_seed(config.seed, &entry.word);
        let pair = noise_word(&entry.word, seed).map_err(|e| match e {
            Error::Input(msg) => Error::Input(format!("{}: {msg}", vocab_path.display())),
            other => other,
        })?;
        pairs.push(pair);
    }
    eprintln!(
        "noised {} words ({} skipped as non-noisable)",
        pairs.len(),
        skipped
    );
    write_jsonl(out, config, &pairs)
}
