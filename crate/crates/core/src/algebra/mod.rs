//! Prime-order groups, their scalar fields, and an optional symmetric pairing.
//!
//! Every scheme in this crate is written against [`Group`] (and [`PairingGroup`]
//! where a bilinear map is needed). Three backends exist:
//!
//! | id        | construction                                  | scalar bytes | element bytes | pairing |
//! |-----------|-----------------------------------------------|--------------|---------------|---------|
//! | `toy23`   | order-11 subgroup of Z_23^*, g = 2            | 1            | 1             | no      |
//! | `test16`  | order-65521 subgroup of Z_p^*, p = 2149481927 | 2            | 4             | no      |
//! | `prod128` | diagonal of G1 x G2 on BLS12-381              | 32           | 144           | yes     |
//!
//! All integers are encoded big-endian at the fixed widths above.

mod bls12;
mod modp;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracles::Xof;

pub use bls12::{DiagElem, Prod128, Prod128Scalar};
pub use modp::{ModElem, ModScalar, Modp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("malformed encoding: {0}")]
    Decode(String),
    #[error("pairing not available on group {0}")]
    PairingUnavailable(GroupId),
}

/// Registry of the supported groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupId {
    Toy23,
    Test16,
    Prod128,
}

impl GroupId {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupId::Toy23 => "toy23",
            GroupId::Test16 => "test16",
            GroupId::Prod128 => "prod128",
        }
    }
}

impl std::fmt::Display for GroupId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GroupId {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "toy23" => Ok(GroupId::Toy23),
            "test16" => Ok(GroupId::Test16),
            "prod128" => Ok(GroupId::Prod128),
            other => Err(AlgebraError::Decode(format!("unknown group id {other:?}"))),
        }
    }
}

/// Public description of a group backend.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupParams {
    pub id: GroupId,
    /// Field modulus in decimal, or the curve name for `prod128`.
    pub modulus: String,
    /// Prime group order in decimal.
    pub order: String,
    /// Hex encoding of the generator.
    pub generator: String,
    pub scalar_bytes: usize,
    pub elem_bytes: usize,
    pub pairing_available: bool,
}

/// Element of the scalar field Z_q.
pub trait Scalar:
    Copy
    + Eq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Multiplicative inverse; `None` for zero.
    fn invert(&self) -> Option<Self>;
}

/// A cyclic group of prime order q with a fixed generator.
///
/// Implementors are zero-sized marker types; all operations are associated
/// functions on the element and scalar types.
pub trait Group: Copy + Debug + Eq + Send + Sync + 'static {
    type Scalar: Scalar;
    type Elem: Copy + Eq + Debug + Send + Sync;

    const ID: GroupId;
    const SCALAR_BYTES: usize;
    const ELEM_BYTES: usize;

    fn params() -> GroupParams;
    fn generator() -> Self::Elem;
    fn identity() -> Self::Elem;
    fn exp(base: &Self::Elem, e: &Self::Scalar) -> Self::Elem;
    fn mul(a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Product of `base_i ^ e_i`.
    fn multi_exp(terms: &[(Self::Elem, Self::Scalar)]) -> Self::Elem {
        terms
            .iter()
            .fold(Self::identity(), |acc, (b, e)| Self::mul(&acc, &Self::exp(b, e)))
    }

    /// `g^e` for the fixed generator.
    fn exp_g(e: &Self::Scalar) -> Self::Elem {
        Self::exp(&Self::generator(), e)
    }

    fn encode_elem(e: &Self::Elem) -> Vec<u8>;
    fn decode_elem(bytes: &[u8]) -> Result<Self::Elem, AlgebraError>;

    fn encode_scalar(s: &Self::Scalar) -> Vec<u8>;
    /// Canonical decode; values `>= q` are rejected.
    fn decode_scalar(bytes: &[u8]) -> Result<Self::Scalar, AlgebraError>;
    /// Reduce an arbitrary big-endian byte string modulo q.
    fn scalar_from_wide(bytes: &[u8]) -> Self::Scalar;
    fn scalar_from_u64(v: u64) -> Self::Scalar;

    /// Quick range test on a big-endian `SCALAR_BYTES` chunk, without decoding.
    fn scalar_in_range(bytes: &[u8]) -> bool {
        Self::decode_scalar(bytes).is_ok()
    }

    /// Uniform nonzero scalar.
    fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> Self::Scalar;

    fn scalar_bits() -> usize {
        8 * Self::SCALAR_BYTES
    }
}

/// A group with a symmetric bilinear map into a target group.
pub trait PairingGroup: Group {
    type Gt: Copy + Eq + Debug + Send + Sync;

    fn pair(a: &Self::Elem, b: &Self::Elem) -> Self::Gt;
    fn gt_identity() -> Self::Gt;
    fn gt_exp(x: &Self::Gt, e: &Self::Scalar) -> Self::Gt;
    fn encode_gt(x: &Self::Gt) -> Vec<u8>;
    fn decode_gt(bytes: &[u8]) -> Result<Self::Gt, AlgebraError>;
}

/// Hash into Z_q \ {0}.
///
/// Reads `2 * SCALAR_BYTES` bytes of SHAKE256 over
/// `frame(tag) || u32be(counter) || msg` and reduces mod q; the counter starts
/// at 0 and is bumped while the result is zero.
pub fn hash_to_scalar<G: Group>(tag: &[u8], msg: &[u8]) -> G::Scalar {
    let mut wide = vec![0u8; 2 * G::SCALAR_BYTES];
    for counter in 0u32.. {
        let mut xof = Xof::new(tag);
        xof.absorb(&counter.to_be_bytes());
        xof.absorb(msg);
        xof.squeeze_into(&mut wide);
        let s = G::scalar_from_wide(&wide);
        if !s.is_zero() {
            return s;
        }
    }
    unreachable!("counter space exhausted")
}

/// Hash into the group as `g^{hash_to_scalar(tag, msg)}`.
///
/// The discrete log of the output is publicly computable. Schemes whose
/// unforgeability relies on an unknown-log hash (BLS, the pairing DVS) are
/// therefore only correct, not secure, under this instantiation.
pub fn hash_to_group<G: Group>(tag: &[u8], msg: &[u8]) -> G::Elem {
    G::exp_g(&hash_to_scalar::<G>(tag, msg))
}

/// Whether `x` lies in the order-q subgroup (`x^q = 1`), checked by
/// multiplying `x^{q-1}` by `x`.
pub fn in_subgroup<G: Group>(x: &G::Elem) -> bool {
    let q_minus_one = -G::Scalar::one();
    G::mul(&G::exp(x, &q_minus_one), x) == G::identity()
}

pub(crate) fn hex_of(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
