//! Corpus ingestion, test-vocabulary extraction, lexicon filtering, and
//! context-window extraction.
//!
//! A "word" throughout is a whitespace-delimited token. The vocabulary keeps
//! every unique (case-sensitive) all-letter token of at least `min_chars`
//! characters, together with its first occurrence and corpus frequency.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noiser::NoisePair;
use crate::Span;

/// One raw input document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusDocument {
    pub identifier: String,
    pub text: String,
}

/// Which characters count as letters when extracting the vocabulary.
///
/// `Unicode` mirrors Python's `str.isalpha`, the usual rule in corpus
/// tooling; `Ascii` restricts to `[A-Za-z]`, the subset the noiser can
/// edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LetterRule {
    #[default]
    Unicode,
    Ascii,
}

impl LetterRule {
    fn accepts(self, word: &str) -> bool {
        match self {
            LetterRule::Unicode => word.chars().all(char::is_alphabetic),
            LetterRule::Ascii => word.bytes().all(|b| b.is_ascii_alphabetic()),
        }
    }
}

/// How a file maps to documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocumentSplit {
    /// One document per file.
    #[default]
    PerFile,
    /// One document per blank-line-delimited block.
    BlankLine,
}

/// A unique test word plus its first corpus occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub word: String,
    /// Identifier of the document of first occurrence.
    pub doc: String,
    /// Whitespace-token index of the first occurrence within that document.
    pub index: usize,
    /// Total count in the corpus.
    pub freq: u64,
}

/// A window of whitespace-delimited words around a target occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextWindow {
    pub word: String,
    pub words: Vec<String>,
    pub target_index: usize,
    /// Single-space join of `words`.
    pub text: String,
    /// Char span of the target word inside `text`.
    pub span: Span,
    /// True when the document was shorter than the requested window.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub shrunk: bool,
}

/// Loads documents from a file or directory (files in lexicographic filename
/// order). Content must be UTF-8; decoding failures name the byte offset.
pub fn load_corpus(
    path: &Path,
    split: DocumentSplit,
) -> Result<impl Iterator<Item = Result<CorpusDocument>>> {
    let mut files = Vec::new();
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_dir() {
        for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            if entry.path().is_file() {
                files.push(entry.path());
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }

    Ok(files.into_iter().flat_map(move |file| {
        let docs = match read_documents(&file, split) {
            Ok(docs) => docs.into_iter().map(Ok).collect(),
            Err(e) => vec![Err(e)],
        };
        docs.into_iter()
    }))
}

fn read_documents(file: &Path, split: DocumentSplit) -> Result<Vec<CorpusDocument>> {
    let bytes = fs::read(file).map_err(|e| Error::io(file, e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Decode {
        path: file.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })?;
    let name = file
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| file.display().to_string());
    match split {
        DocumentSplit::PerFile => Ok(vec![CorpusDocument {
            identifier: name,
            text,
        }]),
        DocumentSplit::BlankLine => {
            // zero-padded block ids keep lexicographic identifier order
            // equal to reading order, which first-occurrence ties rely on
            let mut docs = Vec::new();
            let mut block = String::new();
            let mut n = 0;
            for line in text.split_inclusive('\n') {
                if line.trim().is_empty() {
                    if !block.trim().is_empty() {
                        docs.push(CorpusDocument {
                            identifier: format!("{name}#{n:06}"),
                            text: std::mem::take(&mut block),
                        });
                        n += 1;
                    } else {
                        block.clear();
                    }
                } else {
                    block.push_str(line);
                }
            }
            if !block.trim().is_empty() {
                docs.push(CorpusDocument {
                    identifier: format!("{name}#{n:06}"),
                    text: block,
                });
            }
            Ok(docs)
        }
    }
}

/// Extracts every unique all-letter word of at least `min_chars` characters.
/// Uniqueness is case-sensitive; first occurrences resolve by
/// (document identifier, token index) order, so the result does not depend on
/// the order documents are visited.
pub fn extract_vocabulary(
    corpus: impl Iterator<Item = Result<CorpusDocument>>,
    min_chars: usize,
    letters: LetterRule,
) -> Result<Vec<VocabEntry>> {
    if min_chars < 1 {
        return Err(Error::Config("min_chars must be >= 1".into()));
    }
    let mut entries: HashMap<String, VocabEntry> = HashMap::new();
    for doc in corpus {
        let doc = doc?;
        for (index, token) in doc.text.split_whitespace().enumerate() {
            if token.chars().count() < min_chars || !letters.accepts(token) {
                continue;
            }
            match entries.get_mut(token) {
                Some(e) => {
                    e.freq += 1;
                    if (doc.identifier.as_str(), index) < (e.doc.as_str(), e.index) {
                        e.doc = doc.identifier.clone();
                        e.index = index;
                    }
                }
                None => {
                    entries.insert(
                        token.to_string(),
                        VocabEntry {
                            word: token.to_string(),
                            doc: doc.identifier.clone(),
                            index,
                            freq: 1,
                        },
                    );
                }
            }
        }
    }
    let mut out: Vec<VocabEntry> = entries.into_values().collect();
    out.sort_by(|a, b| a.word.cmp(&b.word));
    Ok(out)
}

/// Keeps the entries whose word is in `lexicon`. Membership is
/// case-insensitive by default (`case_sensitive = false`); most published
/// word lists are lowercase while corpus words are not.
pub fn filter_lexicon(
    vocab: &[VocabEntry],
    lexicon: &HashSet<String>,
    case_sensitive: bool,
) -> Result<Vec<VocabEntry>> {
    if lexicon.is_empty() {
        return Err(Error::Config("lexicon is empty".into()));
    }
    let folded: HashSet<String> = if case_sensitive {
        lexicon.clone()
    } else {
        lexicon.iter().map(|w| w.to_lowercase()).collect()
    };
    Ok(vocab
        .iter()
        .filter(|e| {
            if case_sensitive {
                folded.contains(&e.word)
            } else {
                folded.contains(&e.word.to_lowercase())
            }
        })
        .cloned()
        .collect())
}

/// Reads a newline-delimited word list.
pub fn load_lexicon(path: &Path) -> Result<HashSet<String>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

/// Builds the window for one entry by re-scanning the corpus. For bulk
/// extraction prefer [`extract_contexts`], which loads each document once.
pub fn extract_context(
    corpus: impl Iterator<Item = Result<CorpusDocument>>,
    entry: &VocabEntry,
    window: usize,
) -> Result<ContextWindow> {
    if window < 1 {
        return Err(Error::Config("window must be >= 1".into()));
    }
    for doc in corpus {
        let doc = doc?;
        if doc.identifier == entry.doc {
            let tokens: Vec<&str> = doc.text.split_whitespace().collect();
            return window_from_tokens(&tokens, entry, window);
        }
    }
    Err(Error::WordNotFound {
        word: entry.word.clone(),
    })
}

/// Words whose recorded occurrence could not be resolved, with the reason.
pub type ContextFailures = Vec<(String, Error)>;

/// Extracts windows for many entries, loading each document once. Output
/// order matches `entries` order. Entries whose recorded occurrence cannot be
/// found are returned in the error list rather than aborting the batch.
pub fn extract_contexts(
    corpus: impl Iterator<Item = Result<CorpusDocument>>,
    entries: &[VocabEntry],
    window: usize,
) -> Result<(Vec<ContextWindow>, ContextFailures)> {
    if window < 1 {
        return Err(Error::Config("window must be >= 1".into()));
    }
    let mut by_doc: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, e) in entries.iter().enumerate() {
        by_doc.entry(e.doc.as_str()).or_default().push(i);
    }
    let mut slots: Vec<Option<ContextWindow>> = vec![None; entries.len()];
    let mut failures = Vec::new();
    for doc in corpus {
        let doc = doc?;
        let Some(idxs) = by_doc.get(doc.identifier.as_str()) else {
            continue;
        };
        // tokenize each document once, however many entries it serves
        let tokens: Vec<&str> = doc.text.split_whitespace().collect();
        for &i in idxs {
            match window_from_tokens(&tokens, &entries[i], window) {
                Ok(w) => slots[i] = Some(w),
                Err(e) => failures.push((entries[i].word.clone(), e)),
            }
        }
    }
    let mut out = Vec::with_capacity(entries.len());
    for (i, slot) in slots.into_iter().enumerate() {
        match slot {
            Some(w) => out.push(w),
            None => failures.push((
                entries[i].word.clone(),
                Error::WordNotFound {
                    word: entries[i].word.clone(),
                },
            )),
        }
    }
    Ok((out, failures))
}

fn window_from_tokens(
    tokens: &[&str],
    entry: &VocabEntry,
    window: usize,
) -> Result<ContextWindow> {
    if entry.index >= tokens.len() || tokens[entry.index] != entry.word {
        return Err(Error::Consistency(format!(
            "entry {:?} does not occur at {}:{}",
            entry.word, entry.doc, entry.index
        )));
    }
    let len = tokens.len();
    let shrunk = len < window;
    let width = window.min(len);
    // center the target where document boundaries permit
    let start = entry
        .index
        .saturating_sub(window / 2)
        .min(len - width);
    let words: Vec<String> = tokens[start..start + width]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let target_index = entry.index - start;
    let text = words.join(" ");
    let span_start: usize = words[..target_index]
        .iter()
        .map(|w| w.chars().count() + 1)
        .sum();
    let span = Span::new(span_start, span_start + entry.word.chars().count());
    Ok(ContextWindow {
        word: entry.word.clone(),
        words,
        target_index,
        text,
        span,
        shrunk,
    })
}

/// Applies the pair's single-character edit to the target occurrence inside
/// the window, leaving every other character untouched.
pub fn apply_edit_to_context(context: &ContextWindow, pair: &NoisePair) -> Result<String> {
    if context.word != pair.original
        || context.words.get(context.target_index).map(String::as_str) != Some(&pair.original)
    {
        return Err(Error::Consistency(format!(
            "context target {:?} does not match pair original {:?}",
            context.word, pair.original
        )));
    }
    let edit_at = context.span.start + pair.position;
    let mut out = String::with_capacity(context.text.len());
    let mut replaced = false;
    for (i, ch) in context.text.chars().enumerate() {
        if i == edit_at {
            if ch != pair.original_char {
                return Err(Error::Consistency(format!(
                    "expected {:?} at char {edit_at}, found {ch:?}",
                    pair.original_char
                )));
            }
            out.push(pair.replacement_char);
            replaced = true;
        } else {
            out.push(ch);
        }
    }
    if !replaced {
        return Err(Error::Consistency(format!(
            "edit position {edit_at} is outside the context text"
        )));
    }
    Ok(out)
}

/// Sorted, order-insensitive summary used by tests and the CLI to key
/// vocabularies by word.
pub fn vocab_words(vocab: &[VocabEntry]) -> BTreeMap<&str, u64> {
    vocab.iter().map(|e| (e.word.as_str(), e.freq)).collect()
}
