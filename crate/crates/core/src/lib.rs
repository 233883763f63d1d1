//! Measures how sensitive contextual word embeddings are to minimal
//! orthographic noise.
//!
//! The pipeline: extract a test vocabulary from a corpus ([`corpus`]),
//! derive one single-character edit per word ([`noiser`]), tokenize both
//! forms with from-scratch subword tokenizers ([`tokenizers`]), obtain
//! mean-pooled word embeddings from a pluggable provider ([`embed`]),
//! score each (word, edit) pair with cosine and Spearman similarity
//! ([`metrics`]), and aggregate scores into token-length-binned reports
//! with confidence intervals ([`analysis`]).

pub mod analysis;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod metrics;
pub mod noiser;
pub mod tokenizers;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Half-open interval `[start, end)` of Unicode scalar values (chars) in a
/// source text. All offsets in this crate — tokenizer output, context target
/// spans, provider wire offsets — use char units, so they line up with the
/// offset mappings produced by Python-side embedding providers. Serializes
/// as a two-element `[start, end]` array, matching the wire protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl From<(usize, usize)> for Span {
    fn from((start, end): (usize, usize)) -> Self {
        Span { start, end }
    }
}

impl From<Span> for (usize, usize) {
    fn from(span: Span) -> Self {
        (span.start, span.end)
    }
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Non-empty intersection of two half-open intervals.
    pub fn overlaps(&self, other: &Span) -> bool {
        self.start.max(other.start) < self.end.min(other.end)
    }

    /// Slices `text` at this span, counting in chars.
    pub fn slice<'t>(&self, text: &'t str) -> &'t str {
        let mut it = text.char_indices();
        let from = it
            .by_ref()
            .nth(self.start)
            .map(|(b, _)| b)
            .unwrap_or(text.len());
        let to = if self.is_empty() {
            from
        } else {
            it.nth(self.len() - 1).map(|(b, _)| b).unwrap_or(text.len())
        };
        &text[from..to]
    }
}
