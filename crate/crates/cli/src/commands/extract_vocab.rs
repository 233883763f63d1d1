use std::path::Path;

use orthoprobe::corpus::{extract_vocabulary, filter_lexicon, load_corpus, load_lexicon};
use orthoprobe::error::Result;

use crate::config::RunConfig;
use crate::stage_io::write_jsonl;

pub fn run(config: &RunConfig, out: &Path) -> Result<()> {
    let corpus = load_corpus(config.corpus_path()?, config.split)?;
    let mut vocab = extract_vocabulary(corpus, config.min_chars, config.letters)?;
    let extracted = vocab.len();
    if let Some(lexicon_path) = &config.lexicon {
        let lexicon = load_lexicon(lexicon_path)?;
        vocab = filter_lexicon(&vocab, &lexicon, config.lexicon_case_sensitive)?;
        log::info!(
            "lexicon kept {} of {} vocabulary entries",
            vocab.len(),
            extracted
        );
    }
    eprintln!("extracted {} vocabulary entries", vocab.len());
    write_jsonl(out, config, &vocab)
}
