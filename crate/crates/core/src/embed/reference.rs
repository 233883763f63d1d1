//! Deterministic stand-in provider so the full pipeline runs without model
//! weights.
//!
//! Every token id `t` maps to a fixed unit-norm pseudorandom vector `u(t)`:
//! ChaCha8 seeded with `seed ^ ((t + 1) * 0x9E3779B97F4A7C15)` drives d
//! standard-normal draws, normalized to unit length. The hidden state for
//! token i mixes in the other tokens' directions:
//!
//! ```text
//! h_i = u(t_i) + alpha * mean_{j != i} u(t_j)
//! ```
//!
//! With `alpha = 0` a token's state depends only on its id; larger values
//! couple states to their context the way contextual models do.

use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tokenizers::Tokenizer;

use super::{EmbeddingProvider, HiddenStateMatrix};

pub const DEFAULT_DIMENSION: usize = 64;
pub const DEFAULT_ALPHA: f64 = 0.3;

pub struct ReferenceProvider {
    tokenizer: Arc<Tokenizer>,
    alpha: f64,
    seed: u64,
    dimension: usize,
    tag: String,
}

impl ReferenceProvider {
    pub fn new(
        tokenizer: Arc<Tokenizer>,
        alpha: f64,
        seed: u64,
        dimension: usize,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Config(format!(
                "reference mixing alpha must be in [0, 1), got {alpha}"
            )));
        }
        if dimension < 2 {
            return Err(Error::Config("reference dimension must be >= 2".into()));
        }
        Ok(ReferenceProvider {
            tokenizer,
            alpha,
            seed,
            dimension,
            tag: format!("reference-a{alpha}"),
        })
    }

    /// The fixed unit-norm direction assigned to a token id.
    pub fn token_direction(&self, token_id: u32) -> Vec<f64> {
        let mix = (u64::from(token_id) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ mix);
        let mut v: Vec<f64> = (0..self.dimension)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // d standard normals are never all zero in practice; guard anyway
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        } else {
            v[0] = 1.0;
        }
        v
    }
}

impl EmbeddingProvider for ReferenceProvider {
    fn embed(&self, text: &str) -> Result<HiddenStateMatrix> {
        let seq = self.tokenizer.encode(text);
        let n = seq.ids.len();
        if n == 0 {
            return Err(Error::Input(format!(
                "reference tokenizer produced no tokens for {text:?}"
            )));
        }
        let mut directions: HashMap<u32, Vec<f64>> = HashMap::new();
        for &id in &seq.ids {
            directions
                .entry(id)
                .or_insert_with(|| self.token_direction(id));
        }
        let mut total = vec![0.0; self.dimension];
        for &id in &seq.ids {
            for (acc, x) in total.iter_mut().zip(&directions[&id]) {
                *acc += x;
            }
        }
        let vectors: Vec<Vec<f64>> = seq
            .ids
            .iter()
            .map(|id| {
                let u = &directions[id];
                if n == 1 || self.alpha == 0.0 {
                    u.clone()
                } else {
                    u.iter()
                        .zip(&total)
                        .map(|(ui, ti)| ui + self.alpha * (ti - ui) / (n - 1) as f64)
                        .collect()
                }
            })
            .collect();
        HiddenStateMatrix::new(vectors, seq.offsets)
    }

    fn tag(&self) -> &str {
        &self.tag
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{pool_word, probe_pair_context, probe_pair_nocontext};
    use crate::metrics;
    use crate::noiser::NoisePair;
    use crate::tokenizers::UnigramModel;
    use crate::Span;

    fn word_tokenizer() -> Arc<Tokenizer> {
        // single-char pieces so every letter is one token
        let mut pieces = vec![("<unk>".to_string(), -1.0), ("▁".to_string(), -1.0)];
        for c in 'a'..='z' {
            pieces.push((c.to_string(), -1.0));
        }
        Arc::new(Tokenizer::Unigram(
            UnigramModel::from_pieces(pieces, "<unk>").unwrap(),
        ))
    }

    fn provider(alpha: f64) -> ReferenceProvider {
        ReferenceProvider::new(word_tokenizer(), alpha, 1234, 16).unwrap()
    }

    #[test]
    fn identical_inputs_give_identical_matrices() {
        let p = provider(0.3);
        let a = p.embed("ab cd").unwrap();
        let b = p.embed("ab cd").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn equal_token_ids_share_vectors_at_alpha_zero() {
        let p = provider(0.0);
        // "aba" renders as [▁, a, b, a]
        let m = p.embed("aba").unwrap();
        assert_eq!(m.vectors.len(), 4);
        assert_eq!(m.vectors[1], m.vectors[3]);
        assert_ne!(m.vectors[1], m.vectors[2]);
        // unit norm
        for v in &m.vectors {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn differing_token_ids_give_cosine_below_one() {
        let p = provider(0.0);
        let pair = NoisePair {
            original: "word".into(),
            edited: "ward".into(),
            position: 1,
            original_char: 'o',
            replacement_char: 'a',
            seed: 0,
        };
        let (w, e) = probe_pair_nocontext(&p, &pair).unwrap();
        let cos = metrics::cosine(&w, &e).unwrap();
        assert!(cos < 1.0);
    }

    #[test]
    fn identical_pair_fixture_gives_identical_embeddings() {
        let p = provider(0.3);
        // a bypass fixture where edited == original
        let pair = NoisePair {
            original: "same".into(),
            edited: "same".into(),
            position: 0,
            original_char: 's',
            replacement_char: 's',
            seed: 0,
        };
        let (w, e) = probe_pair_nocontext(&p, &pair).unwrap();
        assert_eq!(w, e);
    }

    #[test]
    fn alpha_zero_context_does_not_leak_into_the_target() {
        let p = provider(0.0);
        let pair = NoisePair {
            original: "word".into(),
            edited: "wird".into(),
            position: 1,
            original_char: 'o',
            replacement_char: 'i',
            seed: 0,
        };
        let (w0, e0) = probe_pair_nocontext(&p, &pair).unwrap();

        let words: Vec<String> =
            ["some", "word", "inside", "stuff"].iter().map(|s| s.to_string()).collect();
        let ctx = crate::corpus::ContextWindow {
            word: "word".into(),
            target_index: 1,
            text: words.join(" "),
            words,
            span: Span::new(5, 9),
            shrunk: false,
        };
        let (w1, e1) = probe_pair_context(&p, &ctx, &pair).unwrap();
        let s0 = metrics::similarity(&w0, &e0).unwrap();
        let s1 = metrics::similarity(&w1, &e1).unwrap();
        assert!((s0.cosine - s1.cosine).abs() < 1e-12);
        assert!((s0.spearman - s1.spearman).abs() < 1e-9);
    }

    #[test]
    fn context_mixing_is_a_bounded_perturbation() {
        // two texts differing in one token: each non-target state moves by
        // at most alpha * ||u_new - u_old|| / (n - 1) in norm
        let alpha = 0.3;
        let p = provider(alpha);
        let a = p.embed("abc").unwrap();
        let b = p.embed("abd").unwrap();
        let n = a.vectors.len() as f64;
        for i in 0..2 {
            // tokens 'a' and 'b' are shared; their u() is unchanged
            let delta: f64 = a.vectors[i]
                .iter()
                .zip(&b.vectors[i])
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            let bound = alpha * 2.0 / (n - 1.0);
            assert!(delta <= bound + 1e-12, "delta {delta} > bound {bound}");
        }
    }

    #[test]
    fn pooled_token_count_matches_tokenizer_length() {
        let p = provider(0.3);
        let tok = word_tokenizer();
        let m = p.embed("pooled").unwrap();
        assert_eq!(m.vectors.len(), tok.token_length("pooled", true));
        // the "▁" marker token has an empty span, so the pooled count equals
        // the marker-free token length
        let span = Span::new(0, 6);
        let overlapping = m.offsets.iter().filter(|o| o.overlaps(&span)).count();
        assert_eq!(overlapping, tok.token_length("pooled", false));
        let pooled = pool_word(&m, span).unwrap();
        assert_eq!(pooled.values.len(), 16);
    }
}
