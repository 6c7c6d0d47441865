use crate::algebra::{hash_to_group, PairingGroup};
use crate::oracles::{BitString, Xof};

pub const TAG_BLS_HASH: &[u8] = b"MDDW/BLS-H";
pub const TAG_BLS_OUT: &[u8] = b"MDDW/BLSH'";
pub const DEFAULT_BLS_BITS: usize = 128;

/// Hash-valued BLS signature: `s = H'(e(h^sk, g))` truncated to `s.len()` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlsSig {
    pub s: BitString,
}

fn h_prime<G: PairingGroup>(x: &G::Gt, bits: usize) -> BitString {
    let mut xof = Xof::new(TAG_BLS_OUT);
    xof.absorb(&G::encode_gt(x));
    xof.squeeze_bits(bits)
}

pub fn bls_sign<G: PairingGroup>(sk: &G::Scalar, msg: &[u8], bits: usize) -> BlsSig {
    let h = hash_to_group::<G>(TAG_BLS_HASH, msg);
    let gt = G::pair(&G::exp(&h, sk), &G::generator());
    BlsSig {
        s: h_prime::<G>(&gt, bits),
    }
}

pub fn bls_verify<G: PairingGroup>(pk: &G::Elem, msg: &[u8], sig: &BlsSig) -> bool {
    let h = hash_to_group::<G>(TAG_BLS_HASH, msg);
    h_prime::<G>(&G::pair(&h, pk), sig.s.len()) == sig.s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Group;
    use crate::Prod128;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn correctness_and_determinism() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for i in 0..100u32 {
            let sk = Prod128::random_scalar(&mut rng);
            let pk = Prod128::exp_g(&sk);
            let msg = i.to_be_bytes();
            let sig = bls_sign::<Prod128>(&sk, &msg, DEFAULT_BLS_BITS);
            assert_eq!(sig.s.len(), 128);
            assert!(bls_verify::<Prod128>(&pk, &msg, &sig));
            if i < 5 {
                assert_eq!(sig, bls_sign::<Prod128>(&sk, &msg, DEFAULT_BLS_BITS));
                assert!(!bls_verify::<Prod128>(&pk, b"other", &sig));
                let mut flipped = sig.clone();
                flipped.s.flip(17);
                assert!(!bls_verify::<Prod128>(&pk, &msg, &flipped));
            }
        }
    }

    #[test]
    fn unrelated_key_never_accepts() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let sk = Prod128::random_scalar(&mut rng);
        let sig = bls_sign::<Prod128>(&sk, b"m", DEFAULT_BLS_BITS);
        let mut hits = 0;
        // each trial costs a pairing; 10^4 trials is the stated scan size
        for _ in 0..10_000 {
            let pk = Prod128::exp_g(&Prod128::random_scalar(&mut rng));
            hits += usize::from(bls_verify::<Prod128>(&pk, b"m", &sig));
        }
        assert_eq!(hits, 0);
    }
}
