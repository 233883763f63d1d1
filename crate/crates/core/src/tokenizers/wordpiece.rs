//! WordPiece greedy longest-match segmentation (the BERT family).
//!
//! Words come from whitespace splitting followed by punctuation isolation;
//! each word is matched greedily from the left, with continuation pieces
//! carrying the `##` prefix. Words with no valid segmentation, or longer
//! than `max_word_chars`, become a single unknown token.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::Span;

use super::TokenSequence;

pub const CONTINUATION_MARKER: &str = "##";
pub const DEFAULT_UNKNOWN: &str = "[UNK]";
pub const DEFAULT_MAX_WORD_CHARS: usize = 100;

#[derive(Debug, Clone)]
pub struct WordPieceModel {
    vocab: HashMap<String, u32>,
    unknown_token: String,
    unknown_id: u32,
    max_word_chars: usize,
}

impl WordPieceModel {
    /// Loads a newline-delimited vocabulary; id = line index. Duplicate
    /// lines are a format error naming the offending line.
    pub fn load(vocab_file: &Path) -> Result<Self> {
        let name = vocab_file.display().to_string();
        let bytes = fs::read(vocab_file).map_err(|e| Error::io(vocab_file, e))?;
        let text = String::from_utf8(bytes).map_err(|e| Error::Decode {
            path: vocab_file.to_path_buf(),
            offset: e.utf8_error().valid_up_to(),
        })?;
        let mut vocab = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if vocab.insert(line.to_string(), i as u32).is_some() {
                return Err(Error::format(
                    &name,
                    i + 1,
                    format!("duplicate token {line:?}"),
                ));
            }
        }
        Self::from_vocab(vocab, DEFAULT_UNKNOWN, DEFAULT_MAX_WORD_CHARS)
    }

    pub fn from_vocab(
        vocab: HashMap<String, u32>,
        unknown_token: &str,
        max_word_chars: usize,
    ) -> Result<Self> {
        let unknown_id = vocab.get(unknown_token).copied().ok_or_else(|| {
            Error::Config(format!(
                "unknown token {unknown_token:?} is not in the vocabulary"
            ))
        })?;
        Ok(WordPieceModel {
            vocab,
            unknown_token: unknown_token.to_string(),
            unknown_id,
            max_word_chars,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.vocab.get(token).copied()
    }

    pub fn encode(&self, text: &str) -> TokenSequence {
        let mut seq = TokenSequence::default();
        for (word, char_start) in split_words(text) {
            self.encode_word_into(word, char_start, &mut seq);
        }
        seq
    }

    /// Greedy longest-match pieces for one already-split word.
    pub fn encode_word(&self, word: &str) -> TokenSequence {
        let mut seq = TokenSequence::default();
        self.encode_word_into(word, 0, &mut seq);
        seq
    }

    fn encode_word_into(&self, word: &str, char_start: usize, seq: &mut TokenSequence) {
        let chars: Vec<char> = word.chars().collect();
        let n = chars.len();
        if n == 0 {
            return;
        }
        if n > self.max_word_chars {
            self.push_unknown(char_start, n, seq);
            return;
        }
        let mut pieces: Vec<(String, usize, usize)> = Vec::new(); // (piece, start, end) in chars
        let mut start = 0;
        while start < n {
            let mut end = n;
            let mut found: Option<String> = None;
            while start < end {
                let mut candidate: String = if start > 0 {
                    CONTINUATION_MARKER.to_string()
                } else {
                    String::new()
                };
                candidate.extend(&chars[start..end]);
                if self.vocab.contains_key(&candidate) {
                    found = Some(candidate);
                    break;
                }
                end -= 1;
            }
            match found {
                Some(piece) => {
                    pieces.push((piece, start, end));
                    start = end;
                }
                None => {
                    self.push_unknown(char_start, n, seq);
                    return;
                }
            }
        }
        for (piece, s, e) in pieces {
            let id = self.vocab[&piece];
            seq.ids.push(id);
            seq.tokens.push(piece);
            seq.offsets.push(Span::new(char_start + s, char_start + e));
        }
    }

    fn push_unknown(&self, char_start: usize, word_chars: usize, seq: &mut TokenSequence) {
        seq.ids.push(self.unknown_id);
        seq.tokens.push(self.unknown_token.clone());
        seq.offsets
            .push(Span::new(char_start, char_start + word_chars));
    }
}

/// BERT-style word boundaries: whitespace splits, then each punctuation
/// character becomes its own word. Punctuation is the ASCII symbol ranges
/// plus Unicode `\p{P}`.
fn split_words(text: &str) -> Vec<(&str, usize)> {
    let mut words = Vec::new();
    let mut word_start: Option<(usize, usize)> = None; // (byte, char)
    for (char_pos, (byte_pos, ch)) in text.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((bs, cs)) = word_start.take() {
                words.push((&text[bs..byte_pos], cs));
            }
        } else if is_punctuation(ch) {
            if let Some((bs, cs)) = word_start.take() {
                words.push((&text[bs..byte_pos], cs));
            }
            words.push((&text[byte_pos..byte_pos + ch.len_utf8()], char_pos));
        } else if word_start.is_none() {
            word_start = Some((byte_pos, char_pos));
        }
    }
    if let Some((bs, cs)) = word_start {
        words.push((&text[bs..], cs));
    }
    words
}

fn is_punctuation(ch: char) -> bool {
    static PUNCT: OnceLock<Regex> = OnceLock::new();
    if ch.is_ascii() {
        return ch.is_ascii_punctuation();
    }
    let re = PUNCT.get_or_init(|| Regex::new(r"\p{P}").expect("static pattern"));
    re.is_match(ch.encode_utf8(&mut [0u8; 4]))
}
