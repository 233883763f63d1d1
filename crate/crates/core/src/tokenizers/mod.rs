//! From-scratch subword tokenizers with character-offset tracking: byte-level
//! BPE, WordPiece, and Unigram — one per probed model family.
//!
//! All three load from the published text formats (`vocab.json` +
//! `merges.txt`, line-per-token `vocab.txt`, and a piece/score TSV) and share
//! the [`TokenSequence`] output shape. Specs are immutable after load;
//! `encode` is a pure function and safe to share across threads.

mod bpe;
mod byte_map;
mod pretokenizer;
mod unigram;
mod wordpiece;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::Span;

pub use bpe::BpeModel;
pub use byte_map::ByteCharMap;
pub use pretokenizer::{pretokenize, PreToken};
pub use unigram::{UnigramModel, DEFAULT_UNKNOWN as UNIGRAM_UNKNOWN, WORD_INITIAL_MARKER};
pub use wordpiece::{
    WordPieceModel, CONTINUATION_MARKER, DEFAULT_MAX_WORD_CHARS,
    DEFAULT_UNKNOWN as WORDPIECE_UNKNOWN,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenizerKind {
    ByteLevelBpe,
    Wordpiece,
    Unigram,
}

impl std::fmt::Display for TokenizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            TokenizerKind::ByteLevelBpe => "byte-level-bpe",
            TokenizerKind::Wordpiece => "wordpiece",
            TokenizerKind::Unigram => "unigram",
        };
        f.write_str(name)
    }
}

/// Token ids, surface strings, and char offsets for one encoded text.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub ids: Vec<u32>,
    pub tokens: Vec<String>,
    pub offsets: Vec<Span>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// One loaded tokenizer of any of the three families.
#[derive(Debug, Clone)]
pub enum Tokenizer {
    ByteLevelBpe(Box<BpeModel>),
    WordPiece(WordPieceModel),
    Unigram(UnigramModel),
}

/// Loads a byte-level BPE model from `vocab.json` and ranked `merges.txt`.
pub fn load_bpe(vocab_file: &Path, merges_file: &Path) -> Result<Tokenizer> {
    Ok(Tokenizer::ByteLevelBpe(Box::new(BpeModel::load(
        vocab_file,
        merges_file,
    )?)))
}

/// Loads a WordPiece model from a newline-delimited `vocab.txt`.
pub fn load_wordpiece(vocab_file: &Path) -> Result<Tokenizer> {
    Ok(Tokenizer::WordPiece(WordPieceModel::load(vocab_file)?))
}

/// Loads a Unigram model from a `piece<TAB>log_prob` TSV.
pub fn load_unigram(tsv_file: &Path) -> Result<Tokenizer> {
    Ok(Tokenizer::Unigram(UnigramModel::load(tsv_file)?))
}

impl Tokenizer {
    pub fn kind(&self) -> TokenizerKind {
        match self {
            Tokenizer::ByteLevelBpe(_) => TokenizerKind::ByteLevelBpe,
            Tokenizer::WordPiece(_) => TokenizerKind::Wordpiece,
            Tokenizer::Unigram(_) => TokenizerKind::Unigram,
        }
    }

    pub fn vocab_size(&self) -> usize {
        match self {
            Tokenizer::ByteLevelBpe(m) => m.vocab_size(),
            Tokenizer::WordPiece(m) => m.vocab_size(),
            Tokenizer::Unigram(m) => m.vocab_size(),
        }
    }

    /// Encodes running text into tokens with char offsets.
    pub fn encode(&self, text: &str) -> TokenSequence {
        match self {
            Tokenizer::ByteLevelBpe(m) => m.encode(text),
            Tokenizer::WordPiece(m) => m.encode(text),
            Tokenizer::Unigram(m) => m.encode(text),
        }
    }

    /// Encodes one word under the family's word-boundary convention:
    /// a leading space for byte-level BPE, the "▁" marker for unigram,
    /// nothing for WordPiece.
    pub fn encode_word(&self, word: &str, word_initial: bool) -> TokenSequence {
        match self {
            Tokenizer::ByteLevelBpe(m) => {
                if word_initial {
                    let mut seq = m.encode(&format!(" {word}"));
                    // the leading space is rendering, not source text
                    for span in &mut seq.offsets {
                        span.start = span.start.saturating_sub(1);
                        span.end = span.end.saturating_sub(1);
                    }
                    seq
                } else {
                    m.encode(word)
                }
            }
            Tokenizer::WordPiece(m) => m.encode_word(word),
            Tokenizer::Unigram(m) => m.encode_word(word, word_initial),
        }
    }

    /// Number of tokens the word costs under the boundary convention.
    pub fn token_length(&self, word: &str, word_initial: bool) -> usize {
        self.encode_word(word, word_initial).len()
    }

    /// Strips the family's word-boundary / continuation markers from a token
    /// surface, for marker-free comparisons.
    pub fn strip_marker<'t>(&self, token: &'t str) -> &'t str {
        match self {
            Tokenizer::ByteLevelBpe(_) => token.strip_prefix('Ġ').unwrap_or(token),
            Tokenizer::WordPiece(_) => {
                token.strip_prefix(CONTINUATION_MARKER).unwrap_or(token)
            }
            Tokenizer::Unigram(_) => {
                token.strip_prefix(WORD_INITIAL_MARKER).unwrap_or(token)
            }
        }
    }
}
