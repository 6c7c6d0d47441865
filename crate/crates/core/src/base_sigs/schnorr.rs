use rand::Rng;

use crate::algebra::{hash_to_scalar, AlgebraError, Group};

pub const TAG_NONCE: &[u8] = b"MDDW/NONCE";
pub const TAG_SCH: &[u8] = b"MDDW/SCH";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchnorrKeyPair<G: Group> {
    pub sk: G::Scalar,
    pub pk: G::Elem,
}

impl<G: Group> SchnorrKeyPair<G> {
    pub fn from_secret(sk: G::Scalar) -> Self {
        SchnorrKeyPair { sk, pk: G::exp_g(&sk) }
    }

    pub fn generate<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_secret(G::random_scalar(rng))
    }
}

/// `(c, z)`, serialized as `c || z` at the group's scalar width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchnorrSig<G: Group> {
    pub c: G::Scalar,
    pub z: G::Scalar,
}

impl<G: Group> SchnorrSig<G> {
    pub const BYTES: usize = 2 * G::SCALAR_BYTES;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = G::encode_scalar(&self.c);
        out.extend(G::encode_scalar(&self.z));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AlgebraError> {
        if bytes.len() != Self::BYTES {
            return Err(AlgebraError::Decode(format!(
                "Schnorr signature must be {} bytes, got {}",
                Self::BYTES,
                bytes.len()
            )));
        }
        let (c, z) = bytes.split_at(G::SCALAR_BYTES);
        Ok(SchnorrSig {
            c: G::decode_scalar(c)?,
            z: G::decode_scalar(z)?,
        })
    }
}

fn challenge<G: Group>(r: &G::Elem, pk: &G::Elem, msg: &[u8]) -> G::Scalar {
    let mut buf = G::encode_elem(r);
    buf.extend(G::encode_elem(pk));
    buf.extend_from_slice(msg);
    hash_to_scalar::<G>(TAG_SCH, &buf)
}

/// Deterministic given `(key, msg, rand32)`.
pub fn schnorr_sign<G: Group>(key: &SchnorrKeyPair<G>, msg: &[u8], rand32: &[u8; 32]) -> SchnorrSig<G> {
    let mut nonce_in = rand32.to_vec();
    nonce_in.extend_from_slice(msg);
    nonce_in.extend(G::encode_elem(&key.pk));
    let k = hash_to_scalar::<G>(TAG_NONCE, &nonce_in);
    let r = G::exp_g(&k);
    let c = challenge::<G>(&r, &key.pk, msg);
    SchnorrSig { c, z: k - c * key.sk }
}

pub fn schnorr_verify<G: Group>(pk: &G::Elem, msg: &[u8], sig: &SchnorrSig<G>) -> bool {
    let r = G::mul(&G::exp(pk, &sig.c), &G::exp_g(&sig.z));
    challenge::<G>(&r, pk, msg) == sig.c
}
