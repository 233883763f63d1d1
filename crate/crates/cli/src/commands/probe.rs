use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use orthoprobe::analysis::SimilarityRecord;
use orthoprobe::corpus::ContextWindow;
use orthoprobe::embed::{probe_pair_context, probe_pair_nocontext, EmbeddingProvider};
use orthoprobe::error::{Error, Result};
use orthoprobe::metrics;
use orthoprobe::noiser::NoisePair;
use orthoprobe::tokenizers::Tokenizer;

use crate::config::RunConfig;
use crate::stage_io::{read_jsonl, write_jsonl};

enum Outcome {
    Record(SimilarityRecord),
    Failed(String, Error),
}

fn score(
    provider: &dyn EmbeddingProvider,
    tokenizer: &Tokenizer,
    pair: &NoisePair,
    context: Option<&ContextWindow>,
) -> Outcome {
    let probed = match context {
        Some(ctx) => probe_pair_context(provider, ctx, pair),
        None => probe_pair_nocontext(provider, pair),
    };
    let (original, edited) = match probed {
        Ok(pair) => pair,
        Err(e) => return Outcome::Failed(pair.original.clone(), e),
    };
    // undefined similarities become null fields, never failures
    let cosine = match metrics::cosine(&original, &edited) {
        Ok(v) => Some(v),
        Err(Error::Undefined(_)) => None,
        Err(e) => return Outcome::Failed(pair.original.clone(), e),
    };
    let spearman = match metrics::spearman(&original, &edited) {
        Ok(v) => Some(v),
        Err(Error::Undefined(_)) => None,
        Err(e) => return Outcome::Failed(pair.original.clone(), e),
    };
    // the binning key: tokens of the unedited word, word-initial for
    // contextual probes where the word sits mid-sentence
    let token_length = tokenizer.token_length(&pair.original, context.is_some());
    Outcome::Record(SimilarityRecord {
        word: pair.original.clone(),
        edited: pair.edited.clone(),
        token_length,
        cosine,
        spearman,
        with_context: context.is_some(),
        model_tag: provider.tag().to_string(),
    })
}

pub fn run(
    config: &RunConfig,
    pairs_path: &Path,
    contexts_path: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let pairs: Vec<NoisePair> = read_jsonl(pairs_path)?;
    let contexts: Option<HashMap<String, ContextWindow>> = match contexts_path {
        Some(path) => {
            let list: Vec<ContextWindow> = read_jsonl(path)?;
            Some(list.into_iter().map(|c| (c.word.clone(), c)).collect())
        }
        None => None,
    };
    let tokenizer = config.load_tokenizer()?;
    let provider = config.build_provider()?;

    // one work item per (pair, context-flag) in input order
    let jobs: Vec<(&NoisePair, Option<&ContextWindow>)> = pairs
        .iter()
        .flat_map(|pair| {
            let mut items = vec![(pair, None)];
            if let Some(map) = &contexts {
                if let Some(ctx) = map.get(&pair.original) {
                    items.push((pair, Some(ctx)));
                }
            }
            items
        })
        .collect();

    let serial = provider.max_in_flight() == Some(1);
    let outcomes: Vec<Outcome> = if serial {
        jobs.iter()
            .map(|(pair, ctx)| score(provider.as_ref(), &tokenizer, pair, *ctx))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers.unwrap_or(0))
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(|| {
            jobs.par_iter()
                .map(|(pair, ctx)| score(provider.as_ref(), &tokenizer, pair, *ctx))
                .collect()
        })
    };

    let mut records = Vec::with_capacity(outcomes.len());
    let mut errors = Vec::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Record(r) => records.push(r),
            Outcome::Failed(word, error) => {
                log::warn!("probe failed for {word:?}: {error}");
                errors.push(ErrorEntry {
                    word,
                    error: error.to_string(),
                });
            }
        }
    }
    let total = records.len() + errors.len();
    eprintln!(
        "probed {total} cases: {} records, {} failures",
        records.len(),
        errors.len()
    );
    write_jsonl(out, config, &records)?;
    if !errors.is_empty() {
        let error_path = errors_path(out);
        write_jsonl(&error_path, config, &errors)?;
        eprintln!("failure details in {}", error_path.display());
    }
    if total > 0 {
        let rate = errors.len() as f64 / total as f64;
        if rate > config.failure_threshold {
            return Err(Error::Transport(format!(
                "provider failure rate {rate:.4} exceeds threshold {}",
                config.failure_threshold
            )));
        }
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct ErrorEntry {
    word: String,
    error: String,
}

fn errors_path(out: &Path) -> std::path::PathBuf {
    match out.file_stem() {
        Some(stem) => {
            let mut name = stem.to_os_string();
            name.push(".errors.jsonl");
            out.with_file_name(name)
        }
        None => out.with_extension("errors.jsonl"),
    }
}
