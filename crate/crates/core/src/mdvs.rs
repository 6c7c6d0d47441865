//! Multi-designated-verifier signature as a two-branch Schnorr OR-proof.
//!
//! For a verifier set `S` (sorted by key encoding, duplicates removed) and a
//! message `m`, the signer derives `h_i = H_h(spk, S, m, i)` and the aggregate
//! key `Y = prod vpk_i^{h_i}`. A signature proves knowledge of either `log_g spk`
//! or `log_g Y`. The signer proves the first branch and simulates the second.
//! The designated verifiers together know `log_g Y = sum vsk_i h_i` and can
//! therefore produce the mirror-image proof ([`mdvs_fge_ds`]).
//!
//! Verification touches only public values, so every designated verifier
//! reaches the same decision on any input. The secret key is used only to check
//! that its owner is in `S`.
//!
//! Hash inputs:
//!
//! * `h_i = hash_to_scalar("MDDW/MDVS/h", enc(spk) || enc(S) || u64be(|m|) || m || u32be(i))`
//! * `c   = hash_to_scalar("MDDW/MDVS/c", enc(T1) || enc(T2) || enc(spk) || (enc(vpk_i) || enc(h_i))* || u64be(|m|) || m || enc(Y))`
//!
//! where `enc(S) = u32be(|S|) || enc(vpk_1) || ...`.
//!
//! Keys are not checked for knowledge of their discrete log. A rogue verifier
//! key can therefore shift `Y` onto a value whose log the adversary knows.

use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

use crate::algebra::{hash_to_scalar, AlgebraError, Group};
use crate::oracles::BitString;

pub const TAG_MDVS_H: &[u8] = b"MDDW/MDVS/h";
pub const TAG_MDVS_C: &[u8] = b"MDDW/MDVS/c";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdvsError {
    #[error("designated verifier set is empty")]
    EmptyVerifierSet,
    #[error("verifier key is not in the designated set")]
    VerifierNotDesignated,
    #[error("expected {expected} signature bits, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error(transparent)]
    Decode(#[from] AlgebraError),
}

/// Key pair shared by signers and verifiers: `pk = g^sk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MdvsKeyPair<G: Group> {
    pub sk: G::Scalar,
    pub pk: G::Elem,
}

impl<G: Group> MdvsKeyPair<G> {
    pub fn from_secret(sk: G::Scalar) -> Self {
        MdvsKeyPair { sk, pk: G::exp_g(&sk) }
    }

    pub fn generate<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_secret(G::random_scalar(rng))
    }
}

/// Canonically ordered, duplicate-free set of verifier public keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifierSet<G: Group> {
    keys: Vec<G::Elem>,
    encoded: Vec<Vec<u8>>,
}

impl<G: Group> VerifierSet<G> {
    pub fn new(vpks: &[G::Elem]) -> Result<Self, MdvsError> {
        if vpks.is_empty() {
            return Err(MdvsError::EmptyVerifierSet);
        }
        let mut pairs: Vec<(Vec<u8>, G::Elem)> = vpks.iter().map(|pk| (G::encode_elem(pk), *pk)).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let (encoded, keys) = pairs.into_iter().unzip();
        Ok(VerifierSet { keys, encoded })
    }

    pub fn keys(&self) -> &[G::Elem] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, pk: &G::Elem) -> bool {
        self.position(pk).is_some()
    }

    fn position(&self, pk: &G::Elem) -> Option<usize> {
        let enc = G::encode_elem(pk);
        self.encoded.binary_search(&enc).ok()
    }

    /// `u32be(|S|) || enc(vpk_1) || ... || enc(vpk_n)` in canonical order.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.len() * G::ELEM_BYTES);
        out.extend_from_slice(&(self.len() as u32).to_be_bytes());
        for e in &self.encoded {
            out.extend_from_slice(e);
        }
        out
    }
}

/// `(c1, c2, z1, z2)`; serialized as their concatenation at the scalar width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MdvsSignature<G: Group> {
    pub c1: G::Scalar,
    pub c2: G::Scalar,
    pub z1: G::Scalar,
    pub z2: G::Scalar,
}

impl<G: Group> MdvsSignature<G> {
    pub const BYTES: usize = 4 * G::SCALAR_BYTES;
    pub const BITS: usize = 8 * Self::BYTES;

    pub fn to_bytes(&self) -> Vec<u8> {
        [self.c1, self.c2, self.z1, self.z2]
            .iter()
            .flat_map(G::encode_scalar)
            .collect()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, MdvsError> {
        if bytes.len() != Self::BYTES {
            return Err(MdvsError::WrongLength {
                expected: Self::BITS,
                got: 8 * bytes.len(),
            });
        }
        let mut parts = bytes.chunks_exact(G::SCALAR_BYTES).map(G::decode_scalar);
        let mut next = || parts.next().expect("four chunks");
        Ok(MdvsSignature {
            c1: next()?,
            c2: next()?,
            z1: next()?,
            z2: next()?,
        })
    }

    pub fn to_bits(&self) -> BitString {
        BitString::from_bytes(&self.to_bytes(), Self::BITS)
    }

    pub fn from_bits(bits: &BitString) -> Result<Self, MdvsError> {
        if bits.len() != Self::BITS {
            return Err(MdvsError::WrongLength {
                expected: Self::BITS,
                got: bits.len(),
            });
        }
        Self::from_bytes(&bits.to_bytes())
    }
}

fn framed_message(m: &[u8]) -> Vec<u8> {
    let mut out = (m.len() as u64).to_be_bytes().to_vec();
    out.extend_from_slice(m);
    out
}

/// The per-verifier coefficients `h_i`, in canonical verifier order.
pub fn coefficients<G: Group>(spk: &G::Elem, set: &VerifierSet<G>, m: &[u8]) -> Vec<G::Scalar> {
    let mut prefix = G::encode_elem(spk);
    prefix.extend(set.encode());
    prefix.extend(framed_message(m));
    (0..set.len() as u32)
        .map(|i| {
            let mut buf = prefix.clone();
            buf.extend_from_slice(&i.to_be_bytes());
            hash_to_scalar::<G>(TAG_MDVS_H, &buf)
        })
        .collect()
}

fn aggregate<G: Group>(set: &VerifierSet<G>, hs: &[G::Scalar]) -> G::Elem {
    let terms: Vec<(G::Elem, G::Scalar)> = set.keys.iter().copied().zip(hs.iter().copied()).collect();
    G::multi_exp(&terms)
}

/// Fiat-Shamir challenge over both commitments and the full statement.
pub fn challenge<G: Group>(
    t1: &G::Elem,
    t2: &G::Elem,
    spk: &G::Elem,
    set: &VerifierSet<G>,
    hs: &[G::Scalar],
    m: &[u8],
    y: &G::Elem,
) -> G::Scalar {
    let mut buf = G::encode_elem(t1);
    buf.extend(G::encode_elem(t2));
    buf.extend(G::encode_elem(spk));
    for (enc, h) in set.encoded.iter().zip(hs) {
        buf.extend_from_slice(enc);
        buf.extend(G::encode_scalar(h));
    }
    buf.extend(framed_message(m));
    buf.extend(G::encode_elem(y));
    hash_to_scalar::<G>(TAG_MDVS_C, &buf)
}

/// Signing nonces: `r` for the real branch, `(c2, z2)` for the simulated one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignNonces<G: Group> {
    pub r: G::Scalar,
    pub c2: G::Scalar,
    pub z2: G::Scalar,
}

impl<G: Group> SignNonces<G> {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        SignNonces {
            r: G::random_scalar(rng),
            c2: G::random_scalar(rng),
            z2: G::random_scalar(rng),
        }
    }
}

pub fn mdvs_sign<G: Group, R: Rng + ?Sized>(
    signer: &MdvsKeyPair<G>,
    set: &VerifierSet<G>,
    m: &[u8],
    rng: &mut R,
) -> MdvsSignature<G> {
    mdvs_sign_with(signer, set, m, &SignNonces::sample(rng))
}

/// Signing with explicit nonces.
pub fn mdvs_sign_with<G: Group>(
    signer: &MdvsKeyPair<G>,
    set: &VerifierSet<G>,
    m: &[u8],
    nonces: &SignNonces<G>,
) -> MdvsSignature<G> {
    let hs = coefficients(&signer.pk, set, m);
    let y = aggregate(set, &hs);
    let t1 = G::exp_g(&nonces.r);
    let t2 = G::mul(&G::exp(&y, &nonces.c2), &G::exp_g(&nonces.z2));
    let c = challenge(&t1, &t2, &signer.pk, set, &hs, m, &y);
    let c1 = c - nonces.c2;
    MdvsSignature {
        c1,
        c2: nonces.c2,
        z1: nonces.r - c1 * signer.sk,
        z2: nonces.z2,
    }
}

/// Verification equation alone, without any membership check.
fn check<G: Group>(spk: &G::Elem, set: &VerifierSet<G>, m: &[u8], sig: &MdvsSignature<G>) -> bool {
    let hs = coefficients(spk, set, m);
    let y = aggregate(set, &hs);
    let t1 = G::mul(&G::exp(spk, &sig.c1), &G::exp_g(&sig.z1));
    let t2 = G::mul(&G::exp(&y, &sig.c2), &G::exp_g(&sig.z2));
    challenge(&t1, &t2, spk, set, &hs, m, &y) == sig.c1 + sig.c2
}

/// Returns false when `g^vsk` is not designated.
pub fn mdvs_verify<G: Group>(
    spk: &G::Elem,
    vsk: &G::Scalar,
    set: &VerifierSet<G>,
    m: &[u8],
    sig: &MdvsSignature<G>,
) -> bool {
    set.contains(&G::exp_g(vsk)) && check(spk, set, m, sig)
}

/// A designated verifier bound to one signer, with membership checked once.
#[derive(Debug, Clone)]
pub struct MdvsVerifier<G: Group> {
    spk: G::Elem,
    set: VerifierSet<G>,
}

impl<G: Group> MdvsVerifier<G> {
    pub fn new(spk: G::Elem, vsk: &G::Scalar, set: VerifierSet<G>) -> Result<Self, MdvsError> {
        if !set.contains(&G::exp_g(vsk)) {
            return Err(MdvsError::VerifierNotDesignated);
        }
        Ok(MdvsVerifier { spk, set })
    }

    pub fn verify(&self, m: &[u8], sig: &MdvsSignature<G>) -> bool {
        check(&self.spk, &self.set, m, sig)
    }

    pub fn spk(&self) -> &G::Elem {
        &self.spk
    }

    pub fn set(&self) -> &VerifierSet<G> {
        &self.set
    }
}

/// Designated-set forgery: all verifier secrets together prove the `Y` branch
/// and simulate the signer branch. The set is `{g^vsk}` for the given secrets.
pub fn mdvs_fge_ds<G: Group, R: Rng + ?Sized>(
    spk: &G::Elem,
    vsks: &[G::Scalar],
    m: &[u8],
    rng: &mut R,
) -> Result<MdvsSignature<G>, MdvsError> {
    let vpks: Vec<G::Elem> = vsks.iter().map(G::exp_g).collect();
    let set = VerifierSet::<G>::new(&vpks)?;
    let hs = coefficients(spk, &set, m);
    let y = aggregate(&set, &hs);
    // log_g Y, summing each distinct key once
    let mut sk_y = G::Scalar::zero();
    let mut used = vec![false; set.len()];
    for (vsk, vpk) in vsks.iter().zip(&vpks) {
        let i = set.position(vpk).expect("set built from these keys");
        if !used[i] {
            used[i] = true;
            sk_y = sk_y + *vsk * hs[i];
        }
    }
    let c1 = G::random_scalar(rng);
    let z1 = G::random_scalar(rng);
    let r = G::random_scalar(rng);
    let t1 = G::mul(&G::exp(spk, &c1), &G::exp_g(&z1));
    let t2 = G::exp_g(&r);
    let c = challenge(&t1, &t2, spk, &set, &hs, m, &y);
    let c2 = c - c1;
    Ok(MdvsSignature {
        c1,
        c2,
        z1,
        z2: r - c2 * sk_y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Prod128, Test16, Toy23};
    use num_traits::One;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    struct Setup<G: Group> {
        signer: MdvsKeyPair<G>,
        verifiers: Vec<MdvsKeyPair<G>>,
        set: VerifierSet<G>,
    }

    fn setup<G: Group>(rng: &mut ChaCha20Rng, n: usize) -> Setup<G> {
        let signer = MdvsKeyPair::generate(rng);
        let verifiers: Vec<_> = (0..n).map(|_| MdvsKeyPair::<G>::generate(rng)).collect();
        let set = VerifierSet::new(&verifiers.iter().map(|v| v.pk).collect::<Vec<_>>()).unwrap();
        Setup { signer, verifiers, set }
    }

    #[test]
    fn every_designated_verifier_accepts() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = setup::<Test16>(&mut rng, 3);
            let sig = mdvs_sign(&s.signer, &s.set, b"hello", &mut rng);
            for v in &s.verifiers {
                assert!(mdvs_verify(&s.signer.pk, &v.sk, &s.set, b"hello", &sig));
            }
        }
        let s = setup::<Prod128>(&mut rng, 3);
        let sig = mdvs_sign(&s.signer, &s.set, b"hello", &mut rng);
        for v in &s.verifiers {
            assert!(mdvs_verify(&s.signer.pk, &v.sk, &s.set, b"hello", &sig));
        }
    }

    #[test]
    fn caller_order_does_not_matter() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let s = setup::<Test16>(&mut rng, 4);
        let mut reversed: Vec<_> = s.verifiers.iter().map(|v| v.pk).collect();
        reversed.reverse();
        reversed.push(reversed[0]);
        let other = VerifierSet::new(&reversed).unwrap();
        assert_eq!(other, s.set);
        let sig = mdvs_sign(&s.signer, &other, b"m", &mut rng);
        assert!(mdvs_verify(&s.signer.pk, &s.verifiers[0].sk, &s.set, b"m", &sig));
    }

    #[test]
    fn empty_set_is_an_error() {
        assert_eq!(VerifierSet::<Test16>::new(&[]), Err(MdvsError::EmptyVerifierSet));
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let spk = Test16::exp_g(&Test16::random_scalar(&mut rng));
        assert_eq!(
            mdvs_fge_ds::<Test16, _>(&spk, &[], b"m", &mut rng),
            Err(MdvsError::EmptyVerifierSet)
        );
    }

    #[test]
    fn tampering_rejects() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let s = setup::<Test16>(&mut rng, 3);
        let vsk = s.verifiers[1].sk;
        let sig = mdvs_sign(&s.signer, &s.set, b"m", &mut rng);
        let one = <Test16 as Group>::Scalar::one();
        for bad in [
            MdvsSignature {
                c1: sig.c1 + one,
                ..sig
            },
            MdvsSignature {
                c2: sig.c2 + one,
                ..sig
            },
            MdvsSignature {
                z1: sig.z1 + one,
                ..sig
            },
            MdvsSignature {
                z2: sig.z2 + one,
                ..sig
            },
        ] {
            assert!(!mdvs_verify(&s.signer.pk, &vsk, &s.set, b"m", &bad));
        }
        let mut wrong_msg = 0;
        for i in 0..100u32 {
            wrong_msg += usize::from(mdvs_verify(&s.signer.pk, &vsk, &s.set, &i.to_be_bytes(), &sig));
        }
        assert_eq!(wrong_msg, 0);
    }

    #[test]
    fn outsiders_are_refused() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let s = setup::<Test16>(&mut rng, 3);
        let outsider = MdvsKeyPair::<Test16>::generate(&mut rng);
        let sig = mdvs_sign(&s.signer, &s.set, b"m", &mut rng);
        assert!(!mdvs_verify(&s.signer.pk, &outsider.sk, &s.set, b"m", &sig));
        assert_eq!(
            MdvsVerifier::new(s.signer.pk, &outsider.sk, s.set.clone()).unwrap_err(),
            MdvsError::VerifierNotDesignated
        );
    }

    #[test]
    fn forged_signature_accepted_by_exactly_the_set() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for _ in 0..20 {
            let s = setup::<Test16>(&mut rng, 3);
            let vsks: Vec<_> = s.verifiers.iter().map(|v| v.sk).collect();
            let sig = mdvs_fge_ds(&s.signer.pk, &vsks, b"forged", &mut rng).unwrap();
            for v in &s.verifiers {
                assert!(mdvs_verify(&s.signer.pk, &v.sk, &s.set, b"forged", &sig));
            }
            let outsider = MdvsKeyPair::<Test16>::generate(&mut rng);
            assert!(!mdvs_verify(&s.signer.pk, &outsider.sk, &s.set, b"forged", &sig));
            // a set missing one secret forges for a different set
            let partial = mdvs_fge_ds(&s.signer.pk, &vsks[..2], b"forged", &mut rng).unwrap();
            assert!(!mdvs_verify(&s.signer.pk, &vsks[0], &s.set, b"forged", &partial));
        }
    }

    #[test]
    fn size_is_independent_of_the_set() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let lens: Vec<usize> = [1, 5, 10]
            .iter()
            .map(|&n| {
                let s = setup::<Test16>(&mut rng, n);
                mdvs_sign(&s.signer, &s.set, b"m", &mut rng).to_bytes().len()
            })
            .collect();
        assert_eq!(lens, vec![8, 8, 8]);
        assert_eq!(MdvsSignature::<Test16>::BITS, 64);
        assert_eq!(MdvsSignature::<Prod128>::BITS, 1024);
    }

    #[test]
    fn bit_decoding_errors() {
        let short = BitString::from_bits([true; 63]);
        assert_eq!(
            MdvsSignature::<Test16>::from_bits(&short),
            Err(MdvsError::WrongLength { expected: 64, got: 63 })
        );
        let high = BitString::from_bits([true; 64]);
        assert!(matches!(
            MdvsSignature::<Test16>::from_bits(&high),
            Err(MdvsError::Decode(_))
        ));
    }

    fn pow(b: u64, e: u64) -> u64 {
        (0..e).fold(1, |acc, _| acc * b % 23)
    }

    #[test]
    fn toy23_equations_by_hand() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for _ in 0..50 {
            let n = rng.gen_range(1..=3);
            let s = setup::<Toy23>(&mut rng, n);
            let nonces = SignNonces::<Toy23>::sample(&mut rng);
            let sig = mdvs_sign_with(&s.signer, &s.set, b"toy", &nonces);
            let hs = coefficients(&s.signer.pk, &s.set, b"toy");
            let y = s
                .set
                .keys()
                .iter()
                .zip(&hs)
                .fold(1, |acc, (k, h)| acc * pow(k.value(), h.value()) % 23);
            let spk = s.signer.pk.value();
            let t1 = pow(spk, sig.c1.value()) * pow(2, sig.z1.value()) % 23;
            assert_eq!(t1, pow(2, nonces.r.value()));
            let t2 = pow(y, sig.c2.value()) * pow(2, sig.z2.value()) % 23;
            let to_elem = |v: u64| Toy23::decode_elem(&[v as u8]).unwrap();
            let c = challenge(
                &to_elem(t1),
                &to_elem(t2),
                &s.signer.pk,
                &s.set,
                &hs,
                b"toy",
                &to_elem(y),
            );
            assert_eq!((sig.c1.value() + sig.c2.value()) % 11, c.value());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn decisions_are_unanimous(seed in 0u64..u64::MAX, raw in proptest::collection::vec(0u64..65521, 4)) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let s = setup::<Test16>(&mut rng, 3);
            let sig = MdvsSignature::<Test16>::from_bytes(
                &raw.iter().flat_map(|v| (*v as u16).to_be_bytes()).collect::<Vec<_>>(),
            ).unwrap();
            let decisions: Vec<bool> = s
                .verifiers
                .iter()
                .map(|v| mdvs_verify(&s.signer.pk, &v.sk, &s.set, b"x", &sig))
                .collect();
            prop_assert!(decisions.iter().all(|d| *d == decisions[0]));
        }

        #[test]
        fn bits_roundtrip(raw in proptest::collection::vec(0u64..65521, 4)) {
            let sig = MdvsSignature::<Test16>::from_bytes(
                &raw.iter().flat_map(|v| (*v as u16).to_be_bytes()).collect::<Vec<_>>(),
            ).unwrap();
            prop_assert_eq!(MdvsSignature::<Test16>::from_bits(&sig.to_bits()).unwrap(), sig);
        }
    }
}
