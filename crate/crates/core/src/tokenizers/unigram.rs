//! Unigram language-model segmentation via Viterbi (the SentencePiece
//! family, e.g. XLNet).
//!
//! Each whitespace-delimited word is rendered with the "▁" word-boundary
//! marker and segmented to maximize the sum of piece log-probabilities.
//! A character no piece covers consumes one unknown token at a fixed
//! penalty of (lowest piece score - 10), which keeps the optimum over real
//! pieces intact.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::Span;

use super::TokenSequence;

pub const WORD_INITIAL_MARKER: char = '▁';
pub const DEFAULT_UNKNOWN: &str = "<unk>";
const UNKNOWN_PENALTY_OFFSET: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct UnigramModel {
    /// piece -> (id, log-probability)
    pieces: HashMap<String, (u32, f64)>,
    unknown_token: String,
    unknown_id: u32,
    unknown_penalty: f64,
    max_piece_chars: usize,
}

impl UnigramModel {
    /// Loads tab-separated `piece<TAB>log_prob` lines; id = line index.
    /// The unknown piece must be present (a unigram model cannot cover
    /// arbitrary input without it).
    pub fn load(tsv_file: &Path) -> Result<Self> {
        let name = tsv_file.display().to_string();
        let bytes = fs::read(tsv_file).map_err(|e| Error::io(tsv_file, e))?;
        let text = String::from_utf8(bytes).map_err(|e| Error::Decode {
            path: tsv_file.to_path_buf(),
            offset: e.utf8_error().valid_up_to(),
        })?;
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let Some((piece, score)) = line.split_once('\t') else {
                return Err(Error::format(&name, i + 1, "expected piece<TAB>log_prob"));
            };
            let score: f64 = score.trim().parse().map_err(|e| {
                Error::format(&name, i + 1, format!("unparsable score: {e}"))
            })?;
            entries.push((piece.to_string(), score));
        }
        Self::from_pieces(entries, DEFAULT_UNKNOWN)
    }

    pub fn from_pieces(entries: Vec<(String, f64)>, unknown_token: &str) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config(
                "a unigram model needs at least the unknown piece".into(),
            ));
        }
        let count = entries.len();
        let mut pieces = HashMap::with_capacity(count);
        let mut max_piece_chars = 1;
        let mut min_score = f64::INFINITY;
        for (i, (piece, score)) in entries.into_iter().enumerate() {
            if score > 0.0 {
                log::warn!("unigram piece {piece:?} has positive log-probability {score}");
            }
            min_score = min_score.min(score);
            max_piece_chars = max_piece_chars.max(piece.chars().count());
            if pieces.insert(piece.clone(), (i as u32, score)).is_some() {
                return Err(Error::Config(format!("duplicate piece {piece:?}")));
            }
        }
        // published models list the unknown piece; hand-built fixtures may
        // not, so a missing one gets the virtual id just past the table
        let unknown_id = pieces
            .get(unknown_token)
            .map(|&(id, _)| id)
            .unwrap_or(count as u32);
        Ok(UnigramModel {
            pieces,
            unknown_token: unknown_token.to_string(),
            unknown_id,
            unknown_penalty: min_score - UNKNOWN_PENALTY_OFFSET,
            max_piece_chars,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.pieces.len()
    }

    pub fn piece_score(&self, piece: &str) -> Option<f64> {
        self.pieces.get(piece).map(|&(_, s)| s)
    }

    pub fn unknown_penalty(&self) -> f64 {
        self.unknown_penalty
    }

    /// Encodes running text: every whitespace-delimited word is segmented in
    /// word-initial form.
    pub fn encode(&self, text: &str) -> TokenSequence {
        let mut seq = TokenSequence::default();
        let mut char_pos = 0;
        let mut byte_pos = 0;
        for word in text.split_whitespace() {
            let word_byte = text[byte_pos..]
                .find(word)
                .map(|off| byte_pos + off)
                .expect("split_whitespace yields substrings");
            let skipped_chars = text[byte_pos..word_byte].chars().count();
            let word_char = char_pos + skipped_chars;
            self.encode_word_into(word, true, word_char, &mut seq);
            char_pos = word_char + word.chars().count();
            byte_pos = word_byte + word.len();
        }
        seq
    }

    /// Viterbi segmentation of a single word; `word_initial` prepends the
    /// "▁" marker.
    pub fn encode_word(&self, word: &str, word_initial: bool) -> TokenSequence {
        let mut seq = TokenSequence::default();
        self.encode_word_into(word, word_initial, 0, &mut seq);
        seq
    }

    /// Total log-probability of the Viterbi segmentation (unknown characters
    /// contribute the fixed penalty).
    pub fn viterbi_score(&self, word: &str, word_initial: bool) -> f64 {
        let rendered = self.render(word, word_initial);
        let (_, score) = self.viterbi(&rendered);
        score
    }

    fn render(&self, word: &str, word_initial: bool) -> String {
        if word_initial {
            let mut s = String::with_capacity(word.len() + 3);
            s.push(WORD_INITIAL_MARKER);
            s.push_str(word);
            s
        } else {
            word.to_string()
        }
    }

    fn encode_word_into(
        &self,
        word: &str,
        word_initial: bool,
        word_char_start: usize,
        seq: &mut TokenSequence,
    ) {
        if word.is_empty() {
            return;
        }
        let rendered = self.render(word, word_initial);
        let (segments, _) = self.viterbi(&rendered);
        // char index into `rendered` -> char index into the source word
        let marker = usize::from(word_initial);
        for seg in segments {
            let (token, id) = match seg.piece {
                Some(id) => (rendered_slice(&rendered, seg.start, seg.end), id),
                None => (self.unknown_token.clone(), self.unknown_id),
            };
            let src_start = word_char_start + seg.start.max(marker) - marker;
            let src_end = word_char_start + seg.end.max(marker) - marker;
            seq.ids.push(id);
            seq.tokens.push(token);
            seq.offsets.push(Span::new(src_start, src_end));
        }
    }

    fn viterbi(&self, rendered: &str) -> (Vec<Segment>, f64) {
        let byte_at: Vec<usize> = rendered
            .char_indices()
            .map(|(b, _)| b)
            .chain(std::iter::once(rendered.len()))
            .collect();
        let n = byte_at.len() - 1; // chars
        let mut best = vec![f64::NEG_INFINITY; n + 1];
        let mut back: Vec<(usize, Option<u32>)> = vec![(0, None); n + 1];
        best[0] = 0.0;
        for end in 1..=n {
            let lo = end.saturating_sub(self.max_piece_chars);
            for start in lo..end {
                let cand = &rendered[byte_at[start]..byte_at[end]];
                if let Some(&(id, score)) = self.pieces.get(cand) {
                    let total = best[start] + score;
                    if total > best[end] {
                        best[end] = total;
                        back[end] = (start, Some(id));
                    }
                }
            }
            // one unknown token per otherwise-uncoverable character
            let total = best[end - 1] + self.unknown_penalty;
            if total > best[end] {
                best[end] = total;
                back[end] = (end - 1, None);
            }
        }
        let mut segments = Vec::new();
        let mut pos = n;
        while pos > 0 {
            let (prev, piece) = back[pos];
            segments.push(Segment {
                start: prev,
                end: pos,
                piece,
            });
            pos = prev;
        }
        segments.reverse();
        (segments, best[n])
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    /// char range within the rendered word
    start: usize,
    end: usize,
    /// piece id, or None for an unknown character
    piece: Option<u32>,
}

fn rendered_slice(rendered: &str, char_start: usize, char_end: usize) -> String {
    rendered
        .chars()
        .skip(char_start)
        .take(char_end - char_start)
        .collect()
}
