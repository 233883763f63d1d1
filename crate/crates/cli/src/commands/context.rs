use std::path::Path;

use orthoprobe::corpus::{extract_contexts, load_corpus, VocabEntry};
use orthoprobe::error::Result;

use crate::config::RunConfig;
use crate::stage_io::{read_jsonl, write_jsonl};

pub fn run(config: &RunConfig, vocab_path: &Path, out: &Path) -> Result<()> {
    let vocab: Vec<VocabEntry> = read_jsonl(vocab_path)?;
    let corpus = load_corpus(config.corpus_path()?, config.split)?;
    let (contexts, failures) = extract_contexts(corpus, &vocab, config.window)?;
    for (word, error) in &failures {
        log::warn!("no context for {word:?}: {error}");
    }
    eprintln!(
        "extracted {} contexts ({} words unresolved)",
        contexts.len(),
        failures.len()
    );
    write_jsonl(out, config, &contexts)
}
