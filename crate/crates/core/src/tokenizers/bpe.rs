//! Byte-level BPE over ranked merges (the GPT-2 / RoBERTa / BLOOM family).
//!
//! Text is pre-tokenized with the GPT-2 split, every pre-token is rendered
//! through the byte map, and the lowest-rank applicable merge is applied
//! until none applies.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::Span;

use super::byte_map::ByteCharMap;
use super::pretokenizer::pretokenize;
use super::TokenSequence;

#[derive(Debug, Clone)]
pub struct BpeModel {
    vocab: HashMap<String, u32>,
    /// left symbol -> right symbol -> rank; two levels so pair lookups
    /// borrow instead of allocating a tuple key
    merge_ranks: HashMap<String, HashMap<String, u32>>,
    merge_count: usize,
    byte_map: ByteCharMap,
    /// Fallback id for symbols outside the vocabulary; `None` for published
    /// models, whose byte symbols give full coverage.
    unknown: Option<(String, u32)>,
}

impl BpeModel {
    /// Loads `vocab_file` (JSON object token -> id) and `merges_file` (one
    /// space-separated symbol pair per line, rank = line order, optional
    /// `#`-prefixed header).
    pub fn load(vocab_file: &Path, merges_file: &Path) -> Result<Self> {
        let vocab_bytes = fs::read(vocab_file).map_err(|e| Error::io(vocab_file, e))?;
        let vocab: HashMap<String, u32> = serde_json::from_slice(&vocab_bytes)
            .map_err(|e| Error::format(vocab_file.display().to_string(), 0, e.to_string()))?;

        // collision-free ids
        let mut ids_seen: HashMap<u32, &String> = HashMap::new();
        for (tok, id) in &vocab {
            if let Some(prev) = ids_seen.insert(*id, tok) {
                return Err(Error::format(
                    vocab_file.display().to_string(),
                    0,
                    format!("id {id} assigned to both {prev:?} and {tok:?}"),
                ));
            }
        }

        let merges_name = merges_file.display().to_string();
        let merges_bytes = fs::read(merges_file).map_err(|e| Error::io(merges_file, e))?;
        let merges_text = String::from_utf8(merges_bytes).map_err(|e| Error::Decode {
            path: merges_file.to_path_buf(),
            offset: e.utf8_error().valid_up_to(),
        })?;

        let mut merge_ranks: HashMap<String, HashMap<String, u32>> = HashMap::new();
        let mut rank = 0u32;
        for (lineno, line) in merges_text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(' ');
            let (Some(left), Some(right), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::format(
                    &merges_name,
                    lineno + 1,
                    "expected exactly two space-separated symbols",
                ));
            };
            let merged = format!("{left}{right}");
            if !vocab.contains_key(&merged) {
                return Err(Error::format(
                    &merges_name,
                    lineno + 1,
                    format!("merge result {merged:?} is not in the vocabulary"),
                ));
            }
            merge_ranks
                .entry(left.to_string())
                .or_default()
                .insert(right.to_string(), rank);
            rank += 1;
        }

        Ok(BpeModel {
            vocab,
            merge_ranks,
            merge_count: rank as usize,
            byte_map: ByteCharMap::new(),
            unknown: None,
        })
    }

    /// Builds a model from in-memory tables (fixtures and tests).
    pub fn from_parts(
        vocab: HashMap<String, u32>,
        merges: Vec<(String, String)>,
        unknown_token: Option<String>,
    ) -> Result<Self> {
        let unknown = match unknown_token {
            Some(tok) => {
                let id = *vocab.get(&tok).ok_or_else(|| {
                    Error::Config(format!("unknown token {tok:?} is not in the vocabulary"))
                })?;
                Some((tok, id))
            }
            None => None,
        };
        let merge_count = merges.len();
        let mut merge_ranks: HashMap<String, HashMap<String, u32>> = HashMap::new();
        for (i, (left, right)) in merges.into_iter().enumerate() {
            merge_ranks.entry(left).or_default().insert(right, i as u32);
        }
        Ok(BpeModel {
            vocab,
            merge_ranks,
            merge_count,
            byte_map: ByteCharMap::new(),
            unknown,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn merge_count(&self) -> usize {
        self.merge_count
    }

    fn pair_rank(&self, left: &str, right: &str) -> Option<u32> {
        self.merge_ranks.get(left)?.get(right).copied()
    }

    pub fn byte_map(&self) -> &ByteCharMap {
        &self.byte_map
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.vocab.get(token).copied()
    }

    /// Encodes `text`, emitting one token per merged symbol with char-unit
    /// offsets into `text`.
    pub fn encode(&self, text: &str) -> TokenSequence {
        let mut seq = TokenSequence::default();
        for pre in pretokenize(text) {
            // merge in mapped-symbol space; each symbol carries the count of
            // source bytes it covers
            let symbols: Vec<String> = pre
                .text
                .bytes()
                .map(|b| self.byte_map.encode_byte(b).to_string())
                .collect();
            let merged = self.merge(symbols);

            // map byte extents back to char offsets (floor at char starts)
            let char_starts = byte_to_char_starts(&pre.text);
            let mut byte_pos = 0;
            for symbol in merged {
                let nbytes = self.byte_map.decode_str(&symbol).len();
                let start = pre.char_start + char_starts[byte_pos];
                let end = pre.char_start + char_starts[byte_pos + nbytes];
                byte_pos += nbytes;
                let id = self
                    .vocab
                    .get(&symbol)
                    .copied()
                    .or(self.unknown.as_ref().map(|(_, id)| *id))
                    .unwrap_or(u32::MAX);
                seq.ids.push(id);
                seq.tokens.push(symbol);
                seq.offsets.push(Span::new(start, end));
            }
        }
        seq
    }

    /// Repeatedly applies the lowest-rank applicable merge.
    fn merge(&self, mut word: Vec<String>) -> Vec<String> {
        while word.len() > 1 {
            let mut best: Option<(u32, usize)> = None;
            for i in 0..word.len() - 1 {
                if let Some(rank) = self.pair_rank(&word[i], &word[i + 1]) {
                    if best.map(|(r, _)| rank < r).unwrap_or(true) {
                        best = Some((rank, i));
                    }
                }
            }
            let Some((_, at)) = best else { break };
            let first = word[at].clone();
            let second = word[at + 1].clone();
            // merge every non-overlapping occurrence of that pair, left to
            // right, in one pass
            let mut merged = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == first && word[i + 1] == second {
                    merged.push(format!("{first}{second}"));
                    i += 2;
                } else {
                    merged.push(std::mem::take(&mut word[i]));
                    i += 1;
                }
            }
            word = merged;
        }
        word
    }
}

/// For each byte index of `s` (inclusive of `s.len()`), the number of chars
/// completed by that byte. A token boundary inside a multi-byte char floors
/// to the char's start, so the char belongs to the token that completes it.
fn byte_to_char_starts(s: &str) -> Vec<usize> {
    let mut starts = vec![0; s.len() + 1];
    let mut completed = 0;
    for (i, slot) in starts.iter_mut().enumerate().skip(1) {
        if s.is_char_boundary(i) {
            completed += 1;
        }
        *slot = completed;
    }
    starts
}
