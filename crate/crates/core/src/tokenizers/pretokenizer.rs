//! The GPT-2 pre-tokenization split: contractions, optionally
//! space-prefixed letter/number/punctuation runs, and whitespace runs that
//! give their final space to the following token.
//!
//! The published pattern relies on a negative lookahead (`\s+(?!\S)`) that
//! the `regex` crate does not support, so this module implements the
//! alternation directly as a scanner with the same leftmost-first semantics:
//! at each position the first matching branch wins, and a whitespace run
//! followed by non-space yields its last character back — that character
//! starts the next token when it is a plain space, otherwise it stands
//! alone.

use std::sync::OnceLock;

use regex::Regex;

const CONTRACTIONS: [&str; 7] = ["'s", "'t", "'re", "'ve", "'m", "'ll", "'d"];

struct Classes {
    letters: Regex,
    numbers: Regex,
    punct: Regex,
    whitespace: Regex,
}

fn classes() -> &'static Classes {
    static C: OnceLock<Classes> = OnceLock::new();
    C.get_or_init(|| Classes {
        letters: Regex::new(r"^\p{L}+").expect("static pattern"),
        numbers: Regex::new(r"^\p{N}+").expect("static pattern"),
        punct: Regex::new(r"^[^\s\p{L}\p{N}]+").expect("static pattern"),
        whitespace: Regex::new(r"^\s+").expect("static pattern"),
    })
}

/// A pre-token and the char offset where it starts in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreToken {
    pub text: String,
    pub char_start: usize,
}

/// Splits `text` into GPT-2 pre-tokens covering every character.
pub fn pretokenize(text: &str) -> Vec<PreToken> {
    let c = classes();
    let mut out = Vec::new();
    let mut byte = 0;
    let mut char_pos = 0;

    while byte < text.len() {
        let rest = &text[byte..];
        let piece_len = if let Some(l) = CONTRACTIONS
            .iter()
            .find(|l| rest.starts_with(**l))
            .map(|l| l.len())
        {
            l
        } else if let Some(m) = run_with_optional_space(rest, c) {
            m
        } else {
            // whitespace run; gives back its last char when followed by
            // non-space
            let m = c
                .whitespace
                .find(rest)
                .expect("every char falls in some class");
            let run = m.as_str();
            if m.end() < rest.len() {
                let last = run.chars().next_back().expect("non-empty run");
                let kept = run.len() - last.len_utf8();
                if kept > 0 {
                    kept
                } else {
                    // single whitespace char before non-space: a plain space
                    // was already consumed by `run_with_optional_space`, so
                    // this one stands alone
                    run.len()
                }
            } else {
                run.len()
            }
        };

        let piece = &rest[..piece_len];
        out.push(PreToken {
            text: piece.to_string(),
            char_start: char_pos,
        });
        char_pos += piece.chars().count();
        byte += piece_len;
    }
    out
}

/// Matches ` ?\p{L}+`, ` ?\p{N}+`, or ` ?[^\s\p{L}\p{N}]+` at the start of
/// `rest`, returning the byte length of the match.
fn run_with_optional_space(rest: &str, c: &Classes) -> Option<usize> {
    let (skip, tail) = if let Some(t) = rest.strip_prefix(' ') {
        (1, t)
    } else {
        (0, rest)
    };
    for class in [&c.letters, &c.numbers, &c.punct] {
        if let Some(m) = class.find(tail) {
            return Some(skip + m.end());
        }
    }
    // nothing but whitespace follows; the whitespace branch takes over
    None
}
