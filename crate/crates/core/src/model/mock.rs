use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{LanguageModel, ModelError};
use crate::oracles::{encode_tokens_unchecked, Token, Xof};

const TAG_MOCK: &[u8] = b"MDDW/MOCK";
const TAG_MOCK_SAMPLER: &[u8] = b"MDDW/MOCK-SAMPLER";

/// Context tokens that influence the candidate set.
const CONTEXT_WINDOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub vocab: u32,
    pub k_cand: u32,
    pub seed: u64,
    pub block_len: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            vocab: 64,
            k_cand: 16,
            seed: 0,
            block_len: 2,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.k_cand < 2 || self.k_cand > self.vocab {
            return Err(ModelError::Config(format!(
                "candidate set size {} must lie in [2, {}]",
                self.k_cand, self.vocab
            )));
        }
        if self.block_len == 0 {
            return Err(ModelError::Config("block length must be positive".into()));
        }
        Ok(())
    }

    /// Min-entropy of one block in bits: `block_len * log2(k_cand)`.
    pub fn min_entropy_bits(&self) -> f64 {
        self.block_len as f64 * f64::from(self.k_cand).log2()
    }
}

/// Mock model: each token is uniform over `k_cand` candidates chosen by hashing
/// `(seed, prompt, last 8 context tokens, absolute position)`.
///
/// Candidate sets are a pure function of the seed; the draws come from a
/// separate ChaCha20 stream, so repeated calls give fresh samples.
#[derive(Debug, Clone)]
pub struct MockModel {
    config: ModelConfig,
    sampler: ChaCha20Rng,
}

impl MockModel {
    pub fn new(config: ModelConfig, sample_seed: u64) -> Result<Self, ModelError> {
        config.validate()?;
        let mut xof = Xof::new(TAG_MOCK_SAMPLER);
        xof.absorb(&sample_seed.to_be_bytes());
        Ok(MockModel {
            config,
            sampler: ChaCha20Rng::from_seed(xof.squeeze32()),
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// Candidate set for the token following `prompt || context`.
    pub fn candidates(&self, prompt: &[Token], context: &[Token]) -> Vec<Token> {
        let v = self.config.vocab;
        if self.config.k_cand == v {
            return (0..v).collect();
        }
        let tail = &context[context.len().saturating_sub(CONTEXT_WINDOW)..];
        let mut xof = Xof::new(TAG_MOCK);
        xof.absorb(&self.config.seed.to_be_bytes());
        xof.absorb(&encode_tokens_unchecked(prompt));
        xof.absorb(&encode_tokens_unchecked(tail));
        xof.absorb(&(context.len() as u64).to_be_bytes());
        let mut rng = ChaCha20Rng::from_seed(xof.squeeze32());
        index::sample(&mut rng, v as usize, self.config.k_cand as usize)
            .into_iter()
            .map(|i| i as Token)
            .collect()
    }
}

impl LanguageModel for MockModel {
    fn vocab_size(&self) -> u32 {
        self.config.vocab
    }

    fn gen_block(&mut self, prompt: &[Token], context: &[Token], len: usize) -> Result<Vec<Token>, ModelError> {
        let mut ctx = context.to_vec();
        for _ in 0..len {
            let cands = self.candidates(prompt, &ctx);
            ctx.push(cands[self.sampler.gen_range(0..cands.len())]);
        }
        Ok(ctx.split_off(context.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn model(vocab: u32, k: u32, block_len: usize) -> MockModel {
        MockModel::new(
            ModelConfig {
                vocab,
                k_cand: k,
                seed: 7,
                block_len,
            },
            1,
        )
        .unwrap()
    }

    #[test]
    fn uniform_when_every_token_is_a_candidate() {
        let mut m = model(64, 64, 2);
        let mut counts = [0u64; 64];
        for i in 0..50_000u32 {
            for t in m.gen_block(&[1], &[i % 64], 2).unwrap() {
                counts[t as usize] += 1;
            }
        }
        let expected = 100_000.0 / 64.0;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new(63.0).unwrap().cdf(stat);
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn candidate_frequencies_at_tiny_parameters() {
        let mut m = model(64, 4, 1);
        let cands = m.candidates(&[3], &[5, 6]);
        assert_eq!(cands.len(), 4);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..10_000 {
            let t = m.gen_block(&[3], &[5, 6], 1).unwrap()[0];
            assert!(cands.contains(&t));
            *counts.entry(t).or_insert(0u32) += 1;
        }
        for c in counts.values() {
            assert!((f64::from(*c) / 10_000.0 - 0.25).abs() < 0.02);
        }
    }

    #[test]
    fn repeated_calls_are_fresh() {
        let mut m = model(64, 16, 2);
        let mut same = 0;
        for _ in 0..1000 {
            let a = m.gen_block(&[], &[1, 2], 2).unwrap();
            let b = m.gen_block(&[], &[1, 2], 2).unwrap();
            assert_eq!(a.len(), 2);
            same += usize::from(a == b);
        }
        // each pair collides with probability 1/256
        assert!(same < 15, "{same} collisions");
    }

    #[test]
    fn candidate_sets_depend_only_on_seed() {
        let a = MockModel::new(
            ModelConfig {
                seed: 9,
                ..Default::default()
            },
            1,
        )
        .unwrap();
        let b = MockModel::new(
            ModelConfig {
                seed: 9,
                ..Default::default()
            },
            2,
        )
        .unwrap();
        let c = MockModel::new(
            ModelConfig {
                seed: 10,
                ..Default::default()
            },
            1,
        )
        .unwrap();
        assert_eq!(a.candidates(&[1], &[2, 3]), b.candidates(&[1], &[2, 3]));
        assert_ne!(a.candidates(&[1], &[2, 3]), c.candidates(&[1], &[2, 3]));
    }

    #[test]
    fn bad_configs_rejected() {
        for k in [0, 1, 65] {
            assert!(MockModel::new(
                ModelConfig {
                    k_cand: k,
                    ..Default::default()
                },
                0
            )
            .is_err());
        }
        assert_eq!(ModelConfig::default().min_entropy_bits(), 8.0);
    }
}
