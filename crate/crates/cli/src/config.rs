//! Run configuration: a TOML file plus command-line overrides.
//!
//! Precedence: command-line flag > config file field > built-in default.
//! The config hash recorded in output metadata covers only the semantic
//! fields (corpus, seed, tokenizer, provider, windows, bins) — not worker
//! counts or output paths — so re-runs of the same experiment produce
//! byte-identical files regardless of parallelism.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use orthoprobe::corpus::{DocumentSplit, LetterRule};
use orthoprobe::embed::{self, EmbeddingProvider, ReferenceConfig};
use orthoprobe::error::{Error, Result};
use orthoprobe::noiser::stable_hash;
use orthoprobe::tokenizers::{self, Tokenizer, TokenizerKind};

pub const DEFAULT_MIN_CHARS: usize = 4;
pub const DEFAULT_WINDOW: usize = 100;
pub const DEFAULT_MAX_BIN: usize = 6;
pub const DEFAULT_FAILURE_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub min_chars: Option<usize>,
    pub seed: Option<u64>,
    pub window: Option<usize>,
    pub letters: Option<LetterRule>,
    pub split: Option<DocumentSplit>,
    pub max_bin: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub lexicon_case_sensitive: Option<bool>,
    pub word_initial: Option<bool>,
    pub workers: Option<usize>,
    pub tokenizer: Option<TokenizerFileConfig>,
    pub provider: Option<ProviderFileConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenizerFileConfig {
    pub kind: TokenizerKind,
    pub vocab: PathBuf,
    pub merges: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderFileConfig {
    pub spec: Option<String>,
    pub alpha: Option<f64>,
    pub dimension: Option<usize>,
    pub failure_threshold: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Flag-level overrides collected by the CLI layer.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub corpus: Option<PathBuf>,
    pub min_chars: Option<usize>,
    pub seed: Option<u64>,
    pub window: Option<usize>,
    pub letters: Option<LetterRule>,
    pub split: Option<DocumentSplit>,
    pub max_bin: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub word_initial: Option<bool>,
    pub workers: Option<usize>,
    pub tokenizer_kind: Option<TokenizerKind>,
    pub vocab_file: Option<PathBuf>,
    pub merges_file: Option<PathBuf>,
    pub provider: Option<String>,
    pub alpha: Option<f64>,
    pub dimension: Option<usize>,
    pub failure_threshold: Option<f64>,
}

/// Fully resolved settings for one run. Serialized (without execution-only
/// fields) to produce the config hash in output metadata.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub min_chars: usize,
    pub seed: u64,
    pub window: usize,
    pub letters: LetterRule,
    pub split: DocumentSplit,
    pub max_bin: usize,
    pub lexicon: Option<PathBuf>,
    pub lexicon_case_sensitive: bool,
    pub word_initial: bool,
    pub tokenizer: Option<ResolvedTokenizer>,
    pub provider_spec: String,
    pub alpha: f64,
    pub dimension: usize,
    pub failure_threshold: f64,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedTokenizer {
    pub kind: TokenizerKind,
    pub vocab: PathBuf,
    pub merges: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<RunConfig> {
        let tokenizer = match (
            flags.tokenizer_kind.or(file.tokenizer.as_ref().map(|t| t.kind)),
            flags
                .vocab_file
                .or(file.tokenizer.as_ref().map(|t| t.vocab.clone())),
        ) {
            (Some(kind), Some(vocab)) => {
                let merges = flags
                    .merges_file
                    .or(file.tokenizer.as_ref().and_then(|t| t.merges.clone()));
                if kind == TokenizerKind::ByteLevelBpe && merges.is_none() {
                    return Err(Error::Config(
                        "byte-level-bpe needs --merges-file".into(),
                    ));
                }
                Some(ResolvedTokenizer {
                    kind,
                    vocab,
                    merges,
                })
            }
            (None, None) => None,
            (Some(_), None) => {
                return Err(Error::Config(
                    "--tokenizer-kind given without --vocab-file".into(),
                ))
            }
            (None, Some(_)) => {
                return Err(Error::Config(
                    "--vocab-file given without --tokenizer-kind".into(),
                ))
            }
        };
        let provider = file.provider.clone().unwrap_or(ProviderFileConfig {
            spec: None,
            alpha: None,
            dimension: None,
            failure_threshold: None,
        });
        let config = RunConfig {
            corpus: flags.corpus.or(file.corpus),
            min_chars: flags
                .min_chars
                .or(file.min_chars)
                .unwrap_or(DEFAULT_MIN_CHARS),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            window: flags.window.or(file.window).unwrap_or(DEFAULT_WINDOW),
            letters: flags.letters.or(file.letters).unwrap_or_default(),
            split: flags.split.or(file.split).unwrap_or_default(),
            max_bin: flags.max_bin.or(file.max_bin).unwrap_or(DEFAULT_MAX_BIN),
            lexicon: flags.lexicon.or(file.lexicon),
            lexicon_case_sensitive: file.lexicon_case_sensitive.unwrap_or(false),
            word_initial: flags.word_initial.or(file.word_initial).unwrap_or(true),
            tokenizer,
            provider_spec: flags
                .provider
                .or(provider.spec)
                .unwrap_or_else(|| "reference".to_string()),
            alpha: flags
                .alpha
                .or(provider.alpha)
                .unwrap_or(embed::DEFAULT_ALPHA),
            dimension: flags
                .dimension
                .or(provider.dimension)
                .unwrap_or(embed::DEFAULT_DIMENSION),
            failure_threshold: flags
                .failure_threshold
                .or(provider.failure_threshold)
                .unwrap_or(DEFAULT_FAILURE_THRESHOLD),
            out_dir: flags
                .out_dir
                .or(file.out_dir)
                .unwrap_or_else(|| PathBuf::from("out")),
            workers: flags.workers.or(file.workers),
        };
        if config.min_chars < 1 {
            return Err(Error::Config("min_chars must be >= 1".into()));
        }
        if config.window < 1 {
            return Err(Error::Config("window must be >= 1".into()));
        }
        if config.max_bin < 1 {
            return Err(Error::Config("max_bin must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&config.alpha) {
            return Err(Error::Config("alpha must be in [0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&config.failure_threshold) {
            return Err(Error::Config(
                "failure_threshold must be in [0, 1]".into(),
            ));
        }
        Ok(config)
    }

    /// Hash of the semantic fields, hex-encoded for metadata lines.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", stable_hash(json.into_bytes()))
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        self.corpus
            .as_deref()
            .ok_or_else(|| Error::Config("no corpus path configured".into()))
    }

    /// Loads the configured tokenizer spec.
    pub fn load_tokenizer(&self) -> Result<Tokenizer> {
        let spec = self.tokenizer.as_ref().ok_or_else(|| {
            Error::Config("no tokenizer configured (kind + vocab file)".into())
        })?;
        match spec.kind {
            TokenizerKind::ByteLevelBpe => {
                let merges = spec.merges.as_ref().ok_or_else(|| {
                    Error::Config("byte-level-bpe needs a merges file".into())
                })?;
                tokenizers::load_bpe(&spec.vocab, merges)
            }
            TokenizerKind::Wordpiece => tokenizers::load_wordpiece(&spec.vocab),
            TokenizerKind::Unigram => tokenizers::load_unigram(&spec.vocab),
        }
    }

    /// Builds the configured embedding provider; the reference provider
    /// reuses the configured tokenizer.
    pub fn build_provider(&self) -> Result<Box<dyn EmbeddingProvider>> {
        let tokenizer = if self.provider_spec == "reference" {
            Some(Arc::new(self.load_tokenizer()?))
        } else {
            None
        };
        embed::provider_from_spec(
            &self.provider_spec,
            ReferenceConfig {
                tokenizer,
                alpha: self.alpha,
                seed: self.seed,
                dimension: self.dimension,
            },
        )
    }
}

pub fn parse_letters(s: &str) -> Result<LetterRule> {
    match s {
        "unicode" => Ok(LetterRule::Unicode),
        "ascii" => Ok(LetterRule::Ascii),
        other => Err(Error::Config(format!(
            "unknown letter rule {other:?}; expected \"unicode\" or \"ascii\""
        ))),
    }
}

pub fn parse_split(s: &str) -> Result<DocumentSplit> {
    match s {
        "per-file" => Ok(DocumentSplit::PerFile),
        "blank-line" => Ok(DocumentSplit::BlankLine),
        other => Err(Error::Config(format!(
            "unknown document split {other:?}; expected \"per-file\" or \"blank-line\""
        ))),
    }
}

pub fn parse_tokenizer_kind(s: &str) -> Result<TokenizerKind> {
    match s {
        "byte-level-bpe" => Ok(TokenizerKind::ByteLevelBpe),
        "wordpiece" => Ok(TokenizerKind::Wordpiece),
        "unigram" => Ok(TokenizerKind::Unigram),
        other => Err(Error::Config(format!(
            "unknown tokenizer kind {other:?}; expected byte-level-bpe, wordpiece, or unigram"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_apply_without_config() {
        let c = RunConfig::resolve(FileConfig::default(), Overrides::default()).unwrap();
        assert_eq!(c.min_chars, 4);
        assert_eq!(c.window, 100);
        assert_eq!(c.max_bin, 6);
        assert_eq!(c.provider_spec, "reference");
        assert_eq!(c.letters, LetterRule::Unicode);
        assert!(c.word_initial);
    }

    #[test]
    fn flags_override_file_values() {
        let file: FileConfig = toml::from_str(
            r#"
            seed = 7
            window = 50
            [tokenizer]
            kind = "wordpiece"
            vocab = "v.txt"
            "#,
        )
        .unwrap();
        let flags = Overrides {
            seed: Some(9),
            ..Default::default()
        };
        let c = RunConfig::resolve(file, flags).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.window, 50);
        assert_eq!(c.tokenizer.as_ref().unwrap().kind, TokenizerKind::Wordpiece);
    }

    #[test]
    fn hash_ignores_workers_and_out_dir() {
        let a = RunConfig::resolve(
            FileConfig::default(),
            Overrides {
                workers: Some(1),
                out_dir: Some("x".into()),
                ..Default::default()
            },
        )
        .unwrap();
        let b = RunConfig::resolve(
            FileConfig::default(),
            Overrides {
                workers: Some(8),
                out_dir: Some("y".into()),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a.hash(), b.hash());

        let c = RunConfig::resolve(
            FileConfig::default(),
            Overrides {
                seed: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn bpe_requires_merges() {
        let err = RunConfig::resolve(
            FileConfig::default(),
            Overrides {
                tokenizer_kind: Some(TokenizerKind::ByteLevelBpe),
                vocab_file: Some("v.json".into()),
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let parsed: std::result::Result<FileConfig, _> = toml::from_str("bogus = 1");
        assert!(parsed.is_err());
    }
}
