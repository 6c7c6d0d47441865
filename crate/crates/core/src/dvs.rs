//! Pairing-based designated-verifier signature.
//!
//! `h = hash_to_group("MDDW/DVS-H0", r || m)` and
//! `s = first l bits of SHAKE256("MDDW/DVS-H1", enc(e(vpk, h^ssk)))`.
//! The designated verifier recomputes the same value as `e(spk, h^vsk)`.
//!
//! In [`DvsMode::Rs`] a fresh 32-byte `r` travels with the signature. In
//! [`DvsMode::SOnly`] it is `SHAKE256("MDDW/DVSR", ctx)` for a context both
//! sides know, and the signature is just `s`.

use rand::Rng;

use crate::algebra::{hash_to_group, AlgebraError, Group, PairingGroup};
use crate::mdvs::MdvsKeyPair;
use crate::oracles::{BitString, Xof};

pub const TAG_DVS_H0: &[u8] = b"MDDW/DVS-H0";
pub const TAG_DVS_H1: &[u8] = b"MDDW/DVS-H1";
pub const TAG_DVS_R: &[u8] = b"MDDW/DVSR";

/// Tag length for production parameters.
pub const DEFAULT_DVS_BITS: usize = 256;

pub type DvsKeyPair<G> = MdvsKeyPair<G>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DvsMode<'a> {
    /// Random `r` carried in the signature.
    Rs,
    /// `r` derived from the given context; signature carries `s` only.
    SOnly(&'a [u8]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DvsSig {
    pub r: Option<[u8; 32]>,
    pub s: BitString,
}

impl DvsSig {
    /// `r || s`, with `r` omitted when absent and `s` zero-padded to a byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.r.map(|r| r.to_vec()).unwrap_or_default();
        out.extend(self.s.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8], with_r: bool, bits: usize) -> Result<Self, AlgebraError> {
        let r_len = if with_r { 32 } else { 0 };
        let s_len = bits.div_ceil(8);
        if bytes.len() != r_len + s_len {
            return Err(AlgebraError::Decode(format!(
                "DVS signature must be {} bytes, got {}",
                r_len + s_len,
                bytes.len()
            )));
        }
        let r = with_r.then(|| bytes[..32].try_into().expect("32 bytes"));
        Ok(DvsSig {
            r,
            s: BitString::from_bytes(&bytes[r_len..], bits),
        })
    }
}

pub fn derive_r(ctx: &[u8]) -> [u8; 32] {
    let mut xof = Xof::new(TAG_DVS_R);
    xof.absorb(ctx);
    xof.squeeze32()
}

fn hashed_point<G: Group>(r: &[u8; 32], m: &[u8]) -> G::Elem {
    let mut input = r.to_vec();
    input.extend_from_slice(m);
    hash_to_group::<G>(TAG_DVS_H0, &input)
}

fn tag_of<G: PairingGroup>(x: &G::Gt, bits: usize) -> BitString {
    let mut xof = Xof::new(TAG_DVS_H1);
    xof.absorb(&G::encode_gt(x));
    xof.squeeze_bits(bits)
}

/// `s` as computed by the signer: `H1(e(vpk, h^ssk))`.
pub fn signer_tag<G: PairingGroup>(ssk: &G::Scalar, vpk: &G::Elem, r: &[u8; 32], m: &[u8], bits: usize) -> BitString {
    let h = hashed_point::<G>(r, m);
    tag_of::<G>(&G::pair(vpk, &G::exp(&h, ssk)), bits)
}

/// `s` as recomputed by the verifier: `H1(e(spk, h^vsk))`.
pub fn verifier_tag<G: PairingGroup>(spk: &G::Elem, vsk: &G::Scalar, r: &[u8; 32], m: &[u8], bits: usize) -> BitString {
    let h = hashed_point::<G>(r, m);
    tag_of::<G>(&G::pair(spk, &G::exp(&h, vsk)), bits)
}

pub fn dvs_sign<G: PairingGroup, R: Rng + ?Sized>(
    ssk: &G::Scalar,
    vpk: &G::Elem,
    m: &[u8],
    mode: DvsMode<'_>,
    bits: usize,
    rng: &mut R,
) -> DvsSig {
    let (r, carried) = match mode {
        DvsMode::Rs => {
            let mut r = [0u8; 32];
            rng.fill(&mut r);
            (r, Some(r))
        }
        DvsMode::SOnly(ctx) => (derive_r(ctx), None),
    };
    DvsSig {
        r: carried,
        s: signer_tag::<G>(ssk, vpk, &r, m, bits),
    }
}

/// Rejects signatures whose shape does not match `mode`.
pub fn dvs_verify<G: PairingGroup>(spk: &G::Elem, vsk: &G::Scalar, m: &[u8], sig: &DvsSig, mode: DvsMode<'_>) -> bool {
    let r = match (mode, sig.r) {
        (DvsMode::Rs, Some(r)) => r,
        (DvsMode::SOnly(ctx), None) => derive_r(ctx),
        _ => return false,
    };
    verifier_tag::<G>(spk, vsk, &r, m, sig.s.len()) == sig.s
}
