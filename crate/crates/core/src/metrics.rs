//! Similarity measures between embedding pairs: cosine and tie-aware
//! Spearman rank correlation.
//!
//! Spearman is computed as the Pearson correlation of average-rank
//! transformed vectors, which handles ties exactly. All accumulation is in
//! f64 regardless of the provider's output precision.

use crate::embed::EmbeddingVector;
use crate::error::{Error, Result};

/// Average-rank transform of a vector (ranks start at 1; ties receive the
/// mean of the ranks they span).
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    pub ranks: Vec<f64>,
}

/// Both similarity measures for one embedding pair.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimilarityScore {
    pub cosine: f64,
    pub spearman: f64,
}

/// Cosine similarity `a·b / (‖a‖‖b‖)`, clamped to `[-1, 1]`.
///
/// Zero-norm inputs are undefined and reported as `Error::Undefined` so the
/// caller can tally the skip instead of polluting aggregates.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.values.len() != b.values.len() {
        return Err(Error::Consistency(format!(
            "cosine dimension mismatch: {} vs {}",
            a.values.len(),
            b.values.len()
        )));
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.values.iter().zip(&b.values) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Undefined("zero-norm vector in cosine".into()));
    }
    // sqrt(na*nb) keeps the a == b case exactly 1
    Ok((dot / (na * nb).sqrt()).clamp(-1.0, 1.0))
}

/// Ascending average ranks starting at 1.
pub fn rank_transform(v: &EmbeddingVector) -> RankVector {
    let n = v.values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| v.values[i].total_cmp(&v.values[j]));

    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        // scan the tie group [i, j)
        let mut j = i + 1;
        while j < n && v.values[order[j]] == v.values[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j averaged over the group
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    RankVector { ranks }
}

/// Spearman rank correlation: Pearson correlation of the two rank vectors.
///
/// A constant input (all components equal) has zero rank variance and the
/// correlation is undefined; reported as `Error::Undefined`.
pub fn spearman(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.values.len() != b.values.len() {
        return Err(Error::Consistency(format!(
            "spearman dimension mismatch: {} vs {}",
            a.values.len(),
            b.values.len()
        )));
    }
    if a.values.len() < 2 {
        return Err(Error::Input(
            "spearman requires dimension >= 2".to_string(),
        ));
    }
    let ra = rank_transform(a);
    let rb = rank_transform(b);
    pearson(&ra.ranks, &rb.ranks)
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::Undefined("constant rank vector".into()));
    }
    Ok((cov / (vx * vy).sqrt()).clamp(-1.0, 1.0))
}

/// Convenience: both measures at once.
pub fn similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<SimilarityScore> {
    Ok(SimilarityScore {
        cosine: cosine(a, b)?,
        spearman: spearman(a, b)?,
    })
}
