//! `orthoprobe` — composable pipeline commands over file-based artifacts:
//!
//! ```text
//! extract-vocab -> noise ---------------+-> probe -> report
//!              \-> context -------------/
//!               \-> tok-stats (histograms)
//! ```
//!
//! Exit codes: 0 success, 1 usage/config error, 2 data/format error,
//! 3 provider/transport error.

mod commands;
mod config;
mod stage_io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_letters, parse_split, parse_tokenizer_kind, FileConfig, Overrides, RunConfig};
use orthoprobe::error::Result;

#[derive(Parser)]
#[command(name = "orthoprobe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonOpts {
    /// TOML run configuration; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Global random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (or directory for multi-file commands)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tokenizer family: byte-level-bpe | wordpiece | unigram
    #[arg(long, value_name = "KIND")]
    tokenizer_kind: Option<String>,
    /// Tokenizer vocabulary: vocab.json (bpe), vocab.txt (wordpiece), or
    /// piece/score TSV (unigram)
    #[arg(long)]
    vocab_file: Option<PathBuf>,
    /// Ranked merges.txt (byte-level-bpe only)
    #[arg(long)]
    merges_file: Option<PathBuf>,
    /// Embedding provider: reference | exec:CMD | http:URL
    #[arg(long)]
    provider: Option<String>,
    /// Context window size in words
    #[arg(long)]
    window: Option<usize>,
    /// Largest individual token-length bin (larger lengths aggregate)
    #[arg(long)]
    max_bin: Option<usize>,
    /// Newline-delimited word list for vocabulary filtering
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Corpus file or directory
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Minimum word length in characters
    #[arg(long)]
    min_chars: Option<usize>,
    /// Which characters count as letters: unicode | ascii
    #[arg(long)]
    letters: Option<String>,
    /// Document boundaries: per-file | blank-line
    #[arg(long)]
    split: Option<String>,
    /// Reference-provider context mixing in [0, 1)
    #[arg(long)]
    alpha: Option<f64>,
    /// Reference-provider embedding dimension
    #[arg(long)]
    dimension: Option<usize>,
    /// Render words in word-initial form for token-length statistics
    #[arg(long)]
    word_initial: Option<bool>,
    /// Worker threads (never changes outputs)
    #[arg(long)]
    workers: Option<usize>,
    /// Abort when more than this fraction of probe calls fail
    #[arg(long)]
    failure_threshold: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the test vocabulary from a corpus (JSON-lines)
    ExtractVocab {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Derive one deterministic single-character edit per vocabulary word
    Noise {
        /// Vocabulary JSON-lines from extract-vocab
        vocab: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Extract one context window per vocabulary word
    Context {
        /// Vocabulary JSON-lines from extract-vocab
        vocab: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Token-length histograms for original and edited words
    TokStats {
        /// Noise-pairs JSON-lines from noise
        pairs: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Also write SVG bar charts
        #[arg(long)]
        svg: bool,
    },
    /// Embed word/edit pairs and score their similarity
    Probe {
        /// Noise-pairs JSON-lines from noise
        pairs: PathBuf,
        /// Context JSON-lines from context; enables the contextual probe
        #[arg(long)]
        contexts: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Aggregate similarity records into token-length-binned statistics
    Report {
        /// Similarity records JSON-lines from probe
        records: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Also write SVG line charts with confidence bands
        #[arg(long)]
        svg: bool,
    },
    /// Tokenize text lines with the configured tokenizer (JSON-lines out)
    Encode {
        /// Input text file, one text per line (stdin when omitted)
        input: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

impl CommonOpts {
    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = Overrides {
            corpus: self.corpus.clone(),
            min_chars: self.min_chars,
            seed: self.seed,
            window: self.window,
            letters: self.letters.as_deref().map(parse_letters).transpose()?,
            split: self.split.as_deref().map(parse_split).transpose()?,
            max_bin: self.max_bin,
            out_dir: None,
            lexicon: self.lexicon.clone(),
            word_initial: self.word_initial,
            workers: self.workers,
            tokenizer_kind: self
                .tokenizer_kind
                .as_deref()
                .map(parse_tokenizer_kind)
                .transpose()?,
            vocab_file: self.vocab_file.clone(),
            merges_file: self.merges_file.clone(),
            provider: self.provider.clone(),
            alpha: self.alpha,
            dimension: self.dimension,
            failure_threshold: self.failure_threshold,
        };
        RunConfig::resolve(file, flags)
    }

    fn out_path(&self, config: &RunConfig, default_name: &str) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| config.out_dir.join(default_name))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ExtractVocab { common } => {
            let config = common.resolve()?;
            let out = common.out_path(&config, "vocab.jsonl");
            commands::extract_vocab::run(&config, &out)
        }
        Command::Noise { vocab, common } => {
            let config = common.resolve()?;
            let out = common.out_path(&config, "pairs.jsonl");
            commands::noise::run(&config, &vocab, &out)
        }
        Command::Context { vocab, common } => {
            let config = common.resolve()?;
            let out = common.out_path(&config, "contexts.jsonl");
            commands::context::run(&config, &vocab, &out)
        }
        Command::TokStats {
            pairs,
            common,
            svg,
        } => {
            let config = common.resolve()?;
            let out = common.out_path(&config, "");
            commands::tok_stats::run(&config, &pairs, &out, svg)
        }
        Command::Probe {
            pairs,
            contexts,
            common,
        } => {
            let config = common.resolve()?;
            let out = common.out_path(&config, "records.jsonl");
            commands::probe::run(&config, &pairs, contexts.as_deref(), &out)
        }
        Command::Report {
            records,
            common,
            svg,
        } => {
            let config = common.resolve()?;
            let out = common.out_path(&config, "report.csv");
            commands::report::run(&config, &records, &out, svg)
        }
        Command::Encode { input, common } => {
            let config = common.resolve()?;
            let out = common.out_path(&config, "tokens.jsonl");
            commands::encode::run(&config, input.as_deref(), &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version go to stdout with success; parse errors are usage
            // errors (exit 1)
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2))
        }
    }
}
