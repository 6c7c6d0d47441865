use std::collections::HashMap;

use crate::oracles::Token;

const BASE: u64 = 0x9e37_79b9_7f4a_7c15;

/// Polynomial hashes (mod 2^64) of every `k`-window, in order.
fn window_hashes(text: &[Token], k: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
    let top = BASE.wrapping_pow(k as u32 - 1);
    let mut h = 0u64;
    text.iter().enumerate().filter_map(move |(i, &t)| {
        if i >= k {
            h = h.wrapping_sub(top.wrapping_mul(u64::from(text[i - k]) + 1));
        }
        h = h.wrapping_mul(BASE).wrapping_add(u64::from(t) + 1);
        (i + 1 >= k).then(|| (i + 1 - k, h))
    })
}

/// True iff no `k` consecutive tokens of `candidate` occur consecutively in
/// any corpus text.
pub fn nolap_k(k: usize, candidate: &[Token], corpus: &[Vec<Token>]) -> bool {
    assert!(k >= 1, "window length must be positive");
    let mut index: HashMap<u64, Vec<(usize, usize)>> = HashMap::new();
    for (doc, text) in corpus.iter().enumerate() {
        for (pos, h) in window_hashes(text, k) {
            index.entry(h).or_default().push((doc, pos));
        }
    }
    !window_hashes(candidate, k).any(|(pos, h)| {
        index.get(&h).is_some_and(|hits| {
            let window = &candidate[pos..pos + k];
            hits.iter().any(|&(doc, at)| &corpus[doc][at..at + k] == window)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert_eq, proptest};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn naive(k: usize, candidate: &[Token], corpus: &[Vec<Token>]) -> bool {
        if candidate.len() < k {
            return true;
        }
        for i in 0..=candidate.len() - k {
            for text in corpus {
                if text.len() < k {
                    continue;
                }
                for j in 0..=text.len() - k {
                    if (0..k).all(|d| candidate[i + d] == text[j + d]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn identical_text_overlaps() {
        let text: Vec<Token> = (0..50).collect();
        for k in 1..=50 {
            assert!(!nolap_k(k, &text, std::slice::from_ref(&text)));
        }
        assert!(nolap_k(51, &text, std::slice::from_ref(&text)));
    }

    #[test]
    fn disjoint_vocabularies() {
        let a: Vec<Token> = (0..40).map(|i| i % 10).collect();
        let b: Vec<Token> = (0..40).map(|i| 10 + i % 10).collect();
        assert!(nolap_k(1, &a, &[b]));
    }

    #[test]
    fn single_planted_window() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for k in 2..8 {
            // candidate over even tokens, corpus over odd tokens, plus one shared k-window
            let mut cand: Vec<Token> = (0..60).map(|_| 2 * rng.gen_range(0..20)).collect();
            let mut doc: Vec<Token> = (0..60).map(|_| 2 * rng.gen_range(0..20) + 1).collect();
            let shared: Vec<Token> = (0..k).map(|i| 1000 + i as Token).collect();
            let at_c = rng.gen_range(0..60 - k);
            let at_d = rng.gen_range(0..60 - k);
            cand[at_c..at_c + k].copy_from_slice(&shared);
            doc[at_d..at_d + k].copy_from_slice(&shared);
            let corpus = vec![doc];
            assert!(!nolap_k(k, &cand, &corpus));
            assert!(nolap_k(k + 1, &cand, &corpus));
            assert_eq!(naive(k, &cand, &corpus), nolap_k(k, &cand, &corpus));
            assert_eq!(naive(k + 1, &cand, &corpus), nolap_k(k + 1, &cand, &corpus));
        }
    }

    proptest! {
        #[test]
        fn agrees_with_naive(
            k in 1usize..5,
            cand in proptest::collection::vec(0u32..4, 0..30),
            corpus in proptest::collection::vec(proptest::collection::vec(0u32..4, 0..30), 0..4),
        ) {
            prop_assert_eq!(nolap_k(k, &cand, &corpus), naive(k, &cand, &corpus));
        }
    }
}
