//! Embedding providers and mean pooling.
//!
//! A provider turns text into one final-layer hidden state per token, with
//! char offsets into its input. The provider owns tokenization of its input
//! (real models use their own tokenizers); token-to-word alignment here is
//! always by character-offset overlap, never by re-tokenizing the word in
//! isolation, because tokenization is context-sensitive at word boundaries.

mod reference;
mod remote;

use serde::{Deserialize, Serialize};

use crate::corpus::{apply_edit_to_context, ContextWindow};
use crate::error::{Error, Result};
use crate::noiser::NoisePair;
use crate::Span;

pub use reference::{ReferenceProvider, DEFAULT_ALPHA, DEFAULT_DIMENSION};
pub use remote::{ExecProvider, HttpProvider};

/// One final-layer hidden state per token.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenStateMatrix {
    pub vectors: Vec<Vec<f64>>,
    pub dimension: usize,
    pub offsets: Vec<Span>,
}

impl HiddenStateMatrix {
    pub fn new(vectors: Vec<Vec<f64>>, offsets: Vec<Span>) -> Result<Self> {
        let dimension = vectors.first().map(Vec::len).unwrap_or(0);
        if vectors.iter().any(|v| v.len() != dimension) {
            return Err(Error::Consistency(
                "hidden state vectors have mixed dimensions".into(),
            ));
        }
        if vectors.len() != offsets.len() {
            return Err(Error::Consistency(format!(
                "{} vectors but {} offsets",
                vectors.len(),
                offsets.len()
            )));
        }
        Ok(HiddenStateMatrix {
            vectors,
            dimension,
            offsets,
        })
    }
}

/// Mean-pooled word representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub values: Vec<f64>,
}

/// Wire request: `{"id": str, "text": str}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProviderRequest {
    pub id: String,
    pub text: String,
}

/// Wire response: `{"id": str, "dim": int, "vectors": [[f64,...],...],
/// "offsets": [[start,end],...]}` with char-unit offsets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProviderResponse {
    pub id: String,
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
    pub offsets: Vec<(usize, usize)>,
}

/// Source of per-token final-layer hidden states.
pub trait EmbeddingProvider: Send + Sync {
    fn embed(&self, text: &str) -> Result<HiddenStateMatrix>;

    /// Maximum concurrent `embed` calls the provider tolerates; `None` means
    /// unlimited.
    fn max_in_flight(&self) -> Option<usize> {
        None
    }

    /// Short tag recorded on similarity records produced with this provider.
    fn tag(&self) -> &str;
}

const TRANSPORT_ATTEMPTS: u32 = 3;
const BACKOFF_BASE_MS: u64 = 100;

/// Calls the provider, retrying transport errors (3 attempts, exponential
/// backoff: 100ms then 200ms).
pub fn embed_sequence(
    provider: &dyn EmbeddingProvider,
    text: &str,
) -> Result<HiddenStateMatrix> {
    if text.is_empty() {
        return Err(Error::Input("cannot embed empty text".into()));
    }
    let mut last = None;
    for attempt in 0..TRANSPORT_ATTEMPTS {
        match provider.embed(text) {
            Ok(m) => return Ok(m),
            Err(e @ Error::Transport(_)) => {
                if attempt + 1 < TRANSPORT_ATTEMPTS {
                    std::thread::sleep(std::time::Duration::from_millis(
                        BACKOFF_BASE_MS << attempt,
                    ));
                }
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("loop ran at least once"))
}

/// Mean of the hidden states whose offsets overlap `target_span`
/// (overlap = non-empty intersection of half-open intervals).
pub fn pool_word(hidden: &HiddenStateMatrix, target_span: Span) -> Result<EmbeddingVector> {
    let mut sum = vec![0.0; hidden.dimension];
    let mut n = 0usize;
    for (vec, span) in hidden.vectors.iter().zip(&hidden.offsets) {
        if span.overlaps(&target_span) {
            for (acc, x) in sum.iter_mut().zip(vec) {
                *acc += x;
            }
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::Coverage {
            start: target_span.start,
            end: target_span.end,
        });
    }
    for acc in &mut sum {
        *acc /= n as f64;
    }
    if sum.iter().any(|x| !x.is_finite()) {
        return Err(Error::Consistency(
            "pooled embedding has non-finite entries".into(),
        ));
    }
    Ok(EmbeddingVector { values: sum })
}

/// Embeds the word and its edit as standalone texts, pooling over all tokens
/// of each.
pub fn probe_pair_nocontext(
    provider: &dyn EmbeddingProvider,
    pair: &NoisePair,
) -> Result<(EmbeddingVector, EmbeddingVector)> {
    let original = embed_sequence(provider, &pair.original)?;
    let edited = embed_sequence(provider, &pair.edited)?;
    let orig_span = Span::new(0, pair.original.chars().count());
    let edit_span = Span::new(0, pair.edited.chars().count());
    Ok((
        pool_word(&original, orig_span)?,
        pool_word(&edited, edit_span)?,
    ))
}

/// Embeds the context text and its single-character-edited twin, pooling each
/// over the target span (the edit is length-preserving so the interval is
/// shared).
pub fn probe_pair_context(
    provider: &dyn EmbeddingProvider,
    context: &ContextWindow,
    pair: &NoisePair,
) -> Result<(EmbeddingVector, EmbeddingVector)> {
    let edited_text = apply_edit_to_context(context, pair)?;
    let original = embed_sequence(provider, &context.text)?;
    let edited = embed_sequence(provider, &edited_text)?;
    if original.dimension != edited.dimension {
        return Err(Error::Consistency(format!(
            "provider dimension changed between calls: {} vs {}",
            original.dimension, edited.dimension
        )));
    }
    Ok((
        pool_word(&original, context.span)?,
        pool_word(&edited, context.span)?,
    ))
}

/// Builds a provider from its selection string: `reference`,
/// `exec:<command>`, or `http:<url>`.
pub fn provider_from_spec(
    spec: &str,
    reference: ReferenceConfig,
) -> Result<Box<dyn EmbeddingProvider>> {
    if spec == "reference" {
        let tok = reference.tokenizer.ok_or_else(|| {
            Error::Config("the reference provider needs a tokenizer spec".into())
        })?;
        return Ok(Box::new(ReferenceProvider::new(
            tok,
            reference.alpha,
            reference.seed,
            reference.dimension,
        )?));
    }
    if let Some(cmd) = spec.strip_prefix("exec:") {
        return Ok(Box::new(ExecProvider::new(cmd)?));
    }
    if spec.starts_with("http://") || spec.starts_with("https://") {
        return Ok(Box::new(HttpProvider::new(spec)?));
    }
    if let Some(url) = spec.strip_prefix("http:") {
        return Ok(Box::new(HttpProvider::new(url)?));
    }
    Err(Error::Config(format!(
        "unknown provider spec {spec:?}; expected \"reference\", \"exec:<command>\", or \"http:<url>\""
    )))
}

/// Settings consumed by [`provider_from_spec`] when the reference provider is
/// selected.
pub struct ReferenceConfig {
    pub tokenizer: Option<std::sync::Arc<crate::tokenizers::Tokenizer>>,
    pub alpha: f64,
    pub seed: u64,
    pub dimension: usize,
}
