//! Token-length-binned aggregation of similarity records, confidence
//! intervals, and token-length distributions.
//!
//! Aggregation is streaming: per-bin Welford accumulators with an
//! associative, commutative merge, so partial states from parallel workers
//! combine into the same totals.

pub mod svg;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenizers::Tokenizer;

/// One probe outcome. `cosine`/`spearman` are `None` when the measure was
/// undefined for the pair (zero vector, constant ranks); such records are
/// excluded from aggregates and tallied separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRecord {
    pub word: String,
    pub edited: String,
    /// Tokens of the unedited word (the binning key).
    pub token_length: usize,
    pub cosine: Option<f64>,
    pub spearman: Option<f64>,
    pub with_context: bool,
    pub model_tag: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Cosine,
    Spearman,
}

impl Measure {
    pub const ALL: [Measure; 2] = [Measure::Cosine, Measure::Spearman];
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Measure::Cosine => f.write_str("cosine"),
            Measure::Spearman => f.write_str("spearman"),
        }
    }
}

/// Normal-approximation z for the supported confidence levels.
pub fn z_for_level(level: f64) -> Result<f64> {
    // pinned constants; 0.99 is the reporting default
    if level == 0.99 {
        Ok(2.5758293)
    } else if level == 0.95 {
        Ok(1.959964)
    } else if level == 0.90 {
        Ok(1.6448536)
    } else {
        Err(Error::Config(format!(
            "unsupported confidence level {level}; use 0.90, 0.95, or 0.99"
        )))
    }
}

/// Mean and normal-approximation interval `mean ± z·s/√n` with the sample
/// standard deviation (n−1 denominator). A single value yields the
/// degenerate interval equal to the value.
pub fn mean_ci(values: &[f64], level: f64) -> Result<(f64, f64, f64)> {
    if values.is_empty() {
        return Err(Error::Input("mean_ci of an empty list".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, mean, mean));
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let half = z_for_level(level)? * var.sqrt() / n.sqrt();
    Ok((mean, mean - half, mean + half))
}

/// Welford accumulator with Chan's parallel merge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d1 = x - self.mean;
        self.mean += d1 / self.n as f64;
        let d2 = x - self.mean;
        self.m2 += d1 * d2;
    }

    pub fn merge(&mut self, other: Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other;
            return;
        }
        let n = (self.n + other.n) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn ci(&self, level: f64) -> Result<(f64, f64, f64)> {
        if self.n == 0 {
            return Err(Error::Input("interval of an empty accumulator".into()));
        }
        if self.n == 1 {
            return Ok((self.mean, self.mean, self.mean));
        }
        let half =
            z_for_level(level)? * self.sample_variance().sqrt() / (self.n as f64).sqrt();
        Ok((self.mean, self.mean - half, self.mean + half))
    }
}

/// Mean and confidence bounds for one token-length bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    /// Token length, or `max_bin + 1` for the aggregate top bin.
    pub bin: usize,
    pub n: u64,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// One (measure, context-flag) group: `max_bin` individual bins plus the
/// aggregate, with empty bins left as `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub measure: Measure,
    pub with_context: bool,
    pub bins: Vec<Option<BinStats>>,
    pub undefined_n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedReport {
    pub max_bin: usize,
    pub groups: Vec<GroupReport>,
}

impl BinnedReport {
    /// Label for a bin index: `"3"`, or `"7+"` for the aggregate.
    pub fn bin_label(&self, bin: usize) -> String {
        if bin > self.max_bin {
            format!("{bin}+")
        } else {
            bin.to_string()
        }
    }
}

/// Streaming, mergeable aggregation state for [`bin_records`].
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregator {
    max_bin: usize,
    // (measure, with_context, bin) -> accumulator
    cells: BTreeMap<(Measure, bool, usize), Moments>,
    undefined: BTreeMap<(Measure, bool), u64>,
    flags_seen: std::collections::BTreeSet<bool>,
}

impl Aggregator {
    pub fn new(max_bin: usize) -> Result<Self> {
        if max_bin < 1 {
            return Err(Error::Config("max_bin must be >= 1".into()));
        }
        Ok(Aggregator {
            max_bin,
            cells: BTreeMap::new(),
            undefined: BTreeMap::new(),
            flags_seen: Default::default(),
        })
    }

    pub fn push(&mut self, record: &SimilarityRecord) {
        let bin = record.token_length.min(self.max_bin + 1).max(1);
        self.flags_seen.insert(record.with_context);
        for (measure, value) in [
            (Measure::Cosine, record.cosine),
            (Measure::Spearman, record.spearman),
        ] {
            match value {
                Some(v) => self
                    .cells
                    .entry((measure, record.with_context, bin))
                    .or_default()
                    .push(v),
                None => {
                    *self
                        .undefined
                        .entry((measure, record.with_context))
                        .or_default() += 1;
                }
            }
        }
    }

    pub fn merge(&mut self, other: Aggregator) {
        debug_assert_eq!(self.max_bin, other.max_bin);
        for (key, m) in other.cells {
            self.cells.entry(key).or_default().merge(m);
        }
        for (key, n) in other.undefined {
            *self.undefined.entry(key).or_default() += n;
        }
        self.flags_seen.extend(other.flags_seen);
    }

    pub fn finish(self, level: f64) -> Result<BinnedReport> {
        let mut groups = Vec::new();
        for measure in Measure::ALL {
            for &with_context in &self.flags_seen {
                let mut bins = Vec::with_capacity(self.max_bin + 1);
                for bin in 1..=self.max_bin + 1 {
                    let stats = match self.cells.get(&(measure, with_context, bin)) {
                        Some(m) if m.count() > 0 => {
                            let (mean, ci_low, ci_high) = m.ci(level)?;
                            Some(BinStats {
                                bin,
                                n: m.count(),
                                mean,
                                ci_low,
                                ci_high,
                            })
                        }
                        _ => None,
                    };
                    bins.push(stats);
                }
                groups.push(GroupReport {
                    measure,
                    with_context,
                    bins,
                    undefined_n: self
                        .undefined
                        .get(&(measure, with_context))
                        .copied()
                        .unwrap_or(0),
                });
            }
        }
        Ok(BinnedReport {
            max_bin: self.max_bin,
            groups,
        })
    }
}

/// Bins records by the unedited word's token length (1..=max_bin plus a
/// `>max_bin` aggregate), separately per measure and context flag, at the
/// 99% confidence level.
pub fn bin_records<'r>(
    records: impl IntoIterator<Item = &'r SimilarityRecord>,
    max_bin: usize,
) -> Result<BinnedReport> {
    let mut agg = Aggregator::new(max_bin)?;
    for r in records {
        agg.push(r);
    }
    agg.finish(0.99)
}

/// Token-length counts over a word set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthHistogram {
    pub counts: BTreeMap<usize, u64>,
    pub total: u64,
    pub noised: bool,
}

impl LengthHistogram {
    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let sum: u64 = self.counts.iter().map(|(len, c)| *len as u64 * c).sum();
        sum as f64 / self.total as f64
    }

    /// Median token length; the average of the two middle values for even
    /// totals.
    pub fn median(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let lower = self.nth_value((self.total - 1) / 2);
        let upper = self.nth_value(self.total / 2);
        (lower + upper) as f64 / 2.0
    }

    fn nth_value(&self, n: u64) -> usize {
        let mut seen = 0;
        for (len, c) in &self.counts {
            seen += c;
            if seen > n {
                return *len;
            }
        }
        0
    }

    /// Fraction of words needing at least `len` tokens.
    pub fn share_at_least(&self, len: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let c: u64 = self
            .counts
            .iter()
            .filter(|(l, _)| **l >= len)
            .map(|(_, c)| c)
            .sum();
        c as f64 / self.total as f64
    }

    /// Fraction of words shorter than `len` tokens.
    pub fn share_below(&self, len: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        1.0 - self.share_at_least(len)
    }
}

/// Histogram of `token_length` over `words` under the given boundary
/// convention.
pub fn length_distribution<I, S>(
    words: I,
    tokenizer: &Tokenizer,
    word_initial: bool,
    noised: bool,
) -> LengthHistogram
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut total = 0;
    for w in words {
        let len = tokenizer.token_length(w.as_ref(), word_initial);
        *counts.entry(len).or_default() += 1;
        total += 1;
    }
    LengthHistogram {
        counts,
        total,
        noised,
    }
}

/// Per-side distribution summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionStats {
    pub total: u64,
    pub mean: f64,
    pub median: f64,
    pub share_ge3: f64,
}

/// Paired original-vs-noised comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub original: DistributionStats,
    pub noised: DistributionStats,
    pub delta_mean: f64,
    pub delta_share_ge3: f64,
}

/// Summarizes two histograms over the same underlying word set.
pub fn compare_distributions(
    original: &LengthHistogram,
    noised: &LengthHistogram,
) -> Result<DistributionSummary> {
    if original.total != noised.total {
        return Err(Error::Consistency(format!(
            "histogram totals differ: {} vs {}",
            original.total, noised.total
        )));
    }
    let side = |h: &LengthHistogram| DistributionStats {
        total: h.total,
        mean: h.mean(),
        median: h.median(),
        share_ge3: h.share_at_least(3),
    };
    let o = side(original);
    let n = side(noised);
    Ok(DistributionSummary {
        original: o,
        noised: n,
        delta_mean: n.mean - o.mean,
        delta_share_ge3: n.share_ge3 - o.share_ge3,
    })
}

/// Writes the report CSV: one row per (measure, context flag, bin), empty
/// mean/ci cells for empty bins. `meta` becomes a leading `#` comment line.
pub fn write_report_csv(report: &BinnedReport, meta: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {meta}\n"));
    out.push_str("measure,with_context,bin,n,mean,ci_low,ci_high,undefined_n\n");
    for g in &report.groups {
        for (i, cell) in g.bins.iter().enumerate() {
            let bin = i + 1;
            let label = report.bin_label(bin);
            match cell {
                Some(s) => out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    g.measure, g.with_context, label, s.n, s.mean, s.ci_low, s.ci_high,
                    g.undefined_n
                )),
                None => out.push_str(&format!(
                    "{},{},{},0,,,,{}\n",
                    g.measure, g.with_context, label, g.undefined_n
                )),
            }
        }
    }
    out
}

/// Writes the histogram CSV (`length,count,noised`), original rows first.
pub fn write_histogram_csv(histograms: &[&LengthHistogram], meta: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {meta}\n"));
    out.push_str("length,count,noised\n");
    for h in histograms {
        for (len, c) in &h.counts {
            out.push_str(&format!("{},{},{}\n", len, c, h.noised));
        }
    }
    out
}
