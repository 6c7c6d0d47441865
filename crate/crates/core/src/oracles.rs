//! Domain-separated random oracles built on SHAKE256.
//!
//! Every oracle hashes `u8(len(tag)) || tag || payload`. Payload layouts:
//!
//! * `H1`  (`MDDW/H1`):  `encode_tokens(block)`, 32 output bytes.
//! * `H2`  (`MDDW/H2`):  `encode_tokens(block)`, output read MSB-first as bits.
//! * `H3`  (`MDDW/H3`):  `u32be(l) || x_1 || b_1 || ... || x_{k-1} || b_{k-1} || x_k`
//!   where `x_i` are the carrier blocks (4 bytes per token, no length header),
//!   `b_i` the already-embedded bits as single bytes 0x00/0x01, and `x_k` the
//!   candidate block. The output bit is the MSB of the first output byte.
//! * `PRF` (`MDDW/PRF`): `key(32) || input`, 32 output bytes.
//! * `COM` (`MDDW/COM`): `r(32) || msg`, 32 output bytes.
//!
//! Token sequences are encoded as `u64be(len) || u32be(token)*`.

use bitvec::prelude::{BitSlice, BitVec, Msb0};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;
use thiserror::Error;

pub type Token = u32;

pub const TAG_H1: &[u8] = b"MDDW/H1";
pub const TAG_H2: &[u8] = b"MDDW/H2";
pub const TAG_H3: &[u8] = b"MDDW/H3";
pub const TAG_PRF: &[u8] = b"MDDW/PRF";
pub const TAG_COM: &[u8] = b"MDDW/COM";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("expected a block of {expected} tokens, got {got}")]
    WrongBlockLength { expected: usize, got: usize },
    #[error("token {token} outside vocabulary of size {vocab}")]
    TokenOutOfRange { token: Token, vocab: u32 },
    #[error("bit strings of different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("malformed token encoding: {0}")]
    Malformed(String),
}

/// SHAKE256 with a framed domain tag already absorbed.
#[derive(Clone)]
pub struct Xof(Shake256);

impl Xof {
    pub fn new(tag: &[u8]) -> Self {
        let tag_len = u8::try_from(tag.len()).expect("domain tags are short");
        let mut h = Shake256::default();
        h.update(&[tag_len]);
        h.update(tag);
        Xof(h)
    }

    pub fn absorb(&mut self, bytes: &[u8]) {
        self.0.update(bytes);
    }

    pub fn squeeze_into(self, out: &mut [u8]) {
        self.0.finalize_xof().read(out);
    }

    pub fn squeeze32(self) -> [u8; 32] {
        let mut out = [0u8; 32];
        self.squeeze_into(&mut out);
        out
    }

    /// First `n` output bits, most significant bit of each byte first.
    pub fn squeeze_bits(self, n: usize) -> BitString {
        let mut bytes = vec![0u8; n.div_ceil(8)];
        self.squeeze_into(&mut bytes);
        BitString::from_bytes(&bytes, n)
    }
}

/// Exact-length bit string, MSB-first within each byte.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(BitVec<u8, Msb0>);

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    /// Take the first `len` bits of `bytes`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(len <= 8 * bytes.len(), "not enough bytes for {len} bits");
        BitString(BitSlice::<u8, Msb0>::from_slice(bytes)[..len].to_bitvec())
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        BitString(bits.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.0.extend_from_bitslice(&other.0);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().by_vals()
    }

    pub fn as_bitslice(&self) -> &BitSlice<u8, Msb0> {
        &self.0
    }

    /// Bits `[start, end)` as a new string.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_bitvec())
    }

    /// Packed bytes, zero-padded at the end to a whole byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = self.0.clone();
        v.set_uninitialized(false);
        v.into_vec()
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString, OracleError> {
        if self.len() != other.len() {
            return Err(OracleError::LengthMismatch(self.len(), other.len()));
        }
        Ok(BitString(self.0.clone() ^ &other.0))
    }

    pub fn flip(&mut self, i: usize) {
        let b = self.0[i];
        self.0.set(i, !b);
    }
}

/// `u64be(len) || u32be(token)*`, checking every token against the vocabulary.
pub fn encode_tokens(tokens: &[Token], vocab: u32) -> Result<Vec<u8>, OracleError> {
    if let Some(&token) = tokens.iter().find(|&&t| t >= vocab) {
        return Err(OracleError::TokenOutOfRange { token, vocab });
    }
    Ok(encode_tokens_unchecked(tokens))
}

pub(crate) fn encode_tokens_unchecked(tokens: &[Token]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 4 * tokens.len());
    out.extend_from_slice(&(tokens.len() as u64).to_be_bytes());
    for t in tokens {
        out.extend_from_slice(&t.to_be_bytes());
    }
    out
}

pub fn decode_tokens(bytes: &[u8], vocab: u32) -> Result<Vec<Token>, OracleError> {
    if bytes.len() < 8 {
        return Err(OracleError::Malformed("missing length header".into()));
    }
    let (head, body) = bytes.split_at(8);
    let len = u64::from_be_bytes(head.try_into().expect("8 bytes"));
    if body.len() as u64 != 4 * len {
        return Err(OracleError::Malformed(format!(
            "header says {len} tokens, body holds {} bytes",
            body.len()
        )));
    }
    let tokens: Vec<Token> = body
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes(c.try_into().expect("4 bytes")))
        .collect();
    if let Some(&token) = tokens.iter().find(|&&t| t >= vocab) {
        return Err(OracleError::TokenOutOfRange { token, vocab });
    }
    Ok(tokens)
}

/// H1/H2/H3 for a fixed block length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockOracles {
    block_len: usize,
}

impl BlockOracles {
    pub fn new(block_len: usize) -> Self {
        assert!(block_len >= 1, "block length must be positive");
        BlockOracles { block_len }
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    fn check_block(&self, tokens: &[Token]) -> Result<(), OracleError> {
        if tokens.len() != self.block_len {
            return Err(OracleError::WrongBlockLength {
                expected: self.block_len,
                got: tokens.len(),
            });
        }
        Ok(())
    }

    /// Message digest of an anchor block.
    pub fn h1_message(&self, block: &[Token]) -> Result<[u8; 32], OracleError> {
        self.check_block(block)?;
        let mut xof = Xof::new(TAG_H1);
        xof.absorb(&encode_tokens_unchecked(block));
        Ok(xof.squeeze32())
    }

    /// `out_bits`-long mask of an anchor block; shorter masks are prefixes of longer ones.
    pub fn h2_mask(&self, block: &[Token], out_bits: usize) -> Result<BitString, OracleError> {
        self.check_block(block)?;
        let mut xof = Xof::new(TAG_H2);
        xof.absorb(&encode_tokens_unchecked(block));
        Ok(xof.squeeze_bits(out_bits))
    }

    /// Carrier bit for candidate block `x` after carriers `m` carrying `sigma_prev`.
    pub fn h3_bit(&self, m: &[Token], x: &[Token], sigma_prev: &BitString) -> Result<bool, OracleError> {
        self.check_block(x)?;
        if !m.len().is_multiple_of(self.block_len) {
            return Err(OracleError::WrongBlockLength {
                expected: self.block_len,
                got: m.len() % self.block_len,
            });
        }
        let blocks = m.len() / self.block_len;
        if sigma_prev.len() != blocks {
            return Err(OracleError::LengthMismatch(sigma_prev.len(), blocks));
        }
        let mut chain = self.h3_chain();
        for (block, bit) in m.chunks_exact(self.block_len).zip(sigma_prev.iter()) {
            chain.push(block, bit);
        }
        Ok(chain.bit_for(x))
    }

    pub fn h3_chain(&self) -> H3Chain {
        H3Chain::new(self.block_len)
    }
}

/// Running H3 state over the carriers accepted so far.
///
/// `bit_for(x)` equals `h3_bit(m, x, sigma_prev)` for the pushed `(m, sigma_prev)`,
/// in O(l) work per call.
#[derive(Clone)]
pub struct H3Chain {
    state: Xof,
    block_len: usize,
    buf: Vec<u8>,
}

impl H3Chain {
    fn new(block_len: usize) -> Self {
        let mut state = Xof::new(TAG_H3);
        state.absorb(&(block_len as u32).to_be_bytes());
        H3Chain {
            state,
            block_len,
            buf: Vec::with_capacity(4 * block_len + 1),
        }
    }

    fn block_bytes(&mut self, block: &[Token]) {
        debug_assert_eq!(block.len(), self.block_len);
        self.buf.clear();
        for t in block {
            self.buf.extend_from_slice(&t.to_be_bytes());
        }
    }

    pub fn bit_for(&mut self, x: &[Token]) -> bool {
        self.block_bytes(x);
        let mut probe = self.state.clone();
        probe.absorb(&self.buf);
        let mut out = [0u8; 1];
        probe.squeeze_into(&mut out);
        out[0] & 0x80 != 0
    }

    pub fn push(&mut self, block: &[Token], bit: bool) {
        self.block_bytes(block);
        self.buf.push(u8::from(bit));
        self.state.absorb(&self.buf);
    }
}

/// 32-byte PRF key.
#[derive(Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrfKey(pub [u8; 32]);

impl std::fmt::Debug for PrfKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PrfKey(..)")
    }
}

impl PrfKey {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut k = [0u8; 32];
        rng.fill(&mut k);
        PrfKey(k)
    }
}

pub fn prf_eval(key: &PrfKey, input: &[u8]) -> [u8; 32] {
    let mut xof = Xof::new(TAG_PRF);
    xof.absorb(&key.0);
    xof.absorb(input);
    xof.squeeze32()
}

/// Hash commitment digest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Commitment(pub [u8; 32]);

pub fn commit(msg: &[u8], r: &[u8; 32]) -> Commitment {
    let mut xof = Xof::new(TAG_COM);
    xof.absorb(r);
    xof.absorb(msg);
    Commitment(xof.squeeze32())
}

pub fn decommit(com: &Commitment, r: &[u8; 32], msg: &[u8]) -> bool {
    commit(msg, r) == *com
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    fn ones_fraction(bits: impl Iterator<Item = bool>) -> f64 {
        let (mut ones, mut total) = (0usize, 0usize);
        for b in bits {
            ones += usize::from(b);
            total += 1;
        }
        ones as f64 / total as f64
    }

    #[test]
    fn h1_determinism_and_distinctness() {
        let o = BlockOracles::new(2);
        assert_eq!(o.h1_message(&[1, 2]).unwrap(), o.h1_message(&[1, 2]).unwrap());
        let mut seen = HashSet::new();
        for i in 0..1000u32 {
            assert!(seen.insert(o.h1_message(&[7, i]).unwrap()));
        }
        assert_eq!(
            o.h1_message(&[1, 2, 3]),
            Err(OracleError::WrongBlockLength { expected: 2, got: 3 })
        );
    }

    #[test]
    fn h2_prefix_and_involution() {
        let o = BlockOracles::new(2);
        let long = o.h2_mask(&[3, 4], 64).unwrap();
        let short = o.h2_mask(&[3, 4], 8).unwrap();
        assert_eq!(short, long.slice(0, 8));
        let x = BitString::from_bits((0..64).map(|i| i % 3 == 0));
        assert_eq!(x.xor(&long).unwrap().xor(&long).unwrap(), x);
        assert!(x.xor(&short).is_err());
    }

    #[test]
    fn h2_monobit_balance() {
        let o = BlockOracles::new(2);
        let bits: Vec<bool> = (0..100u32)
            .flat_map(|i| o.h2_mask(&[i, i + 1], 1000).unwrap().iter().collect::<Vec<_>>())
            .collect();
        assert_eq!(bits.len(), 100_000);
        let f = ones_fraction(bits.into_iter());
        assert!((f - 0.5).abs() < 0.01, "fraction {f}");
    }

    #[test]
    fn h3_balance_and_chain_agreement() {
        let o = BlockOracles::new(2);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut ones = 0;
        for _ in 0..10_000 {
            let k = rng.gen_range(0..6);
            let m: Vec<Token> = (0..2 * k).map(|_| rng.gen_range(0..64)).collect();
            let sigma = BitString::from_bits((0..k).map(|_| rng.gen::<bool>()));
            let x: Vec<Token> = (0..2).map(|_| rng.gen_range(0..64)).collect();
            let embed_side = o.h3_bit(&m, &x, &sigma).unwrap();
            // detector recomputation: chain over m, then query x
            let mut chain = o.h3_chain();
            for (blk, b) in m.chunks(2).zip(sigma.iter()) {
                chain.push(blk, b);
            }
            assert_eq!(chain.bit_for(&x), embed_side);
            assert_eq!(o.h3_bit(&m, &x, &sigma).unwrap(), embed_side);
            ones += usize::from(embed_side);
        }
        let f = ones as f64 / 10_000.0;
        assert!((f - 0.5).abs() < 0.02, "fraction {f}");
    }

    #[test]
    fn h3_precondition_errors() {
        let o = BlockOracles::new(2);
        assert!(o.h3_bit(&[], &[1], &BitString::new()).is_err());
        assert!(o.h3_bit(&[1], &[1, 2], &BitString::new()).is_err());
        assert!(matches!(
            o.h3_bit(&[1, 2], &[1, 2], &BitString::new()),
            Err(OracleError::LengthMismatch(0, 1))
        ));
    }

    #[test]
    fn prf_keys_separate_outputs() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let k = PrfKey::random(&mut rng);
        assert_eq!(prf_eval(&k, b"x"), prf_eval(&k, b"x"));
        let mut bits = Vec::new();
        for i in 0..1000u32 {
            let a = PrfKey::random(&mut rng);
            let b = PrfKey::random(&mut rng);
            assert_ne!(prf_eval(&a, b"same"), prf_eval(&b, b"same"));
            let out = prf_eval(&k, &i.to_be_bytes());
            bits.extend(BitString::from_bytes(&out, 256).iter());
        }
        // 1000 * 256 bits
        let f = ones_fraction(bits.into_iter().take(100_000));
        assert!((f - 0.5).abs() < 0.01, "fraction {f}");
    }

    #[test]
    fn commitment_open_and_bind() {
        let r = [9u8; 32];
        let com = commit(b"hello", &r);
        assert!(decommit(&com, &r, b"hello"));
        assert!(!decommit(&com, &r, b"hellp"));
        let mut r2 = r;
        r2[0] ^= 1;
        assert!(!decommit(&com, &r2, b"hello"));
        let mut com2 = com;
        com2.0[31] ^= 0x80;
        assert!(!decommit(&com2, &r, b"hello"));

        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut seen = HashSet::new();
        for _ in 0..1000 {
            let mut r = [0u8; 32];
            rng.fill(&mut r);
            assert!(seen.insert(commit(b"m", &r)));
        }
    }

    #[test]
    fn token_encoding_edges() {
        assert_eq!(encode_tokens(&[], 64).unwrap(), vec![0u8; 8]);
        assert_ne!(
            encode_tokens(&[1, 2], 64).unwrap(),
            encode_tokens(&[1, 2, 0], 64).unwrap()
        );
        assert_eq!(
            encode_tokens(&[1, 64], 64),
            Err(OracleError::TokenOutOfRange { token: 64, vocab: 64 })
        );
        assert!(decode_tokens(&[0, 0, 0, 0, 0, 0, 0, 1], 64).is_err());
    }

    #[test]
    fn bitstring_bytes() {
        let b = BitString::from_bytes(&[0b1010_0000], 3);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![true, false, true]);
        assert_eq!(b.to_bytes(), vec![0b1010_0000]);
    }

    proptest! {
        #[test]
        fn token_encoding_roundtrip(tokens in proptest::collection::vec(0u32..1000, 0..64)) {
            let enc = encode_tokens(&tokens, 1000).unwrap();
            prop_assert_eq!(enc.len(), 8 + 4 * tokens.len());
            prop_assert_eq!(decode_tokens(&enc, 1000).unwrap(), tokens);
        }

        #[test]
        fn bitstring_bytes_roundtrip(bytes in proptest::collection::vec(any::<u8>(), 1..40), cut in 0usize..8) {
            let len = 8 * bytes.len() - cut;
            let b = BitString::from_bytes(&bytes, len);
            prop_assert_eq!(BitString::from_bytes(&b.to_bytes(), len), b);
        }
    }
}
