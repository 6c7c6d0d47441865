use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::Rng;

use super::{hex_of, AlgebraError, Group, GroupId, GroupParams, Scalar};

/// Order-`Q` subgroup of Z_P^*, generated by `GEN`.
///
/// `P` must stay below 2^32 so products fit in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modp<const P: u64, const Q: u64, const GEN: u64>;

/// Residue modulo `Q`, always reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModScalar<const Q: u64>(u64);

/// Residue modulo `P` lying in the order-q subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModElem<const P: u64>(u64);

impl<const Q: u64> ModScalar<Q> {
    pub fn new(v: u64) -> Self {
        ModScalar(v % Q)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl<const P: u64> ModElem<P> {
    pub fn value(self) -> u64 {
        self.0
    }
}

const fn byte_len(mut v: u64) -> usize {
    let mut n = 0;
    while v > 0 {
        n += 1;
        v >>= 8;
    }
    n
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

fn be_to_u64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0u64, |acc, &b| (acc << 8) | u64::from(b))
}

fn u64_to_be(v: u64, width: usize) -> Vec<u8> {
    v.to_be_bytes()[8 - width..].to_vec()
}

impl<const Q: u64> Add for ModScalar<Q> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        ModScalar((self.0 + rhs.0) % Q)
    }
}

impl<const Q: u64> Sub for ModScalar<Q> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        ModScalar((self.0 + Q - rhs.0) % Q)
    }
}

impl<const Q: u64> Mul for ModScalar<Q> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        ModScalar(self.0 * rhs.0 % Q)
    }
}

impl<const Q: u64> Neg for ModScalar<Q> {
    type Output = Self;
    fn neg(self) -> Self {
        ModScalar((Q - self.0) % Q)
    }
}

impl<const Q: u64> Zero for ModScalar<Q> {
    fn zero() -> Self {
        ModScalar(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const Q: u64> One for ModScalar<Q> {
    fn one() -> Self {
        ModScalar(1 % Q)
    }
}

impl<const Q: u64> Scalar for ModScalar<Q> {
    fn invert(&self) -> Option<Self> {
        // Q is prime: a^{Q-2} = a^{-1}
        (self.0 != 0).then(|| ModScalar(pow_mod(self.0, Q - 2, Q)))
    }
}

impl<const P: u64, const Q: u64, const GEN: u64> Group for Modp<P, Q, GEN> {
    type Scalar = ModScalar<Q>;
    type Elem = ModElem<P>;

    const ID: GroupId = match (P, Q) {
        (23, 11) => GroupId::Toy23,
        _ => GroupId::Test16,
    };
    const SCALAR_BYTES: usize = byte_len(Q - 1);
    const ELEM_BYTES: usize = byte_len(P - 1);

    fn params() -> GroupParams {
        GroupParams {
            id: Self::ID,
            modulus: P.to_string(),
            order: Q.to_string(),
            generator: hex_of(&u64_to_be(GEN, Self::ELEM_BYTES)),
            scalar_bytes: Self::SCALAR_BYTES,
            elem_bytes: Self::ELEM_BYTES,
            pairing_available: false,
        }
    }

    fn generator() -> Self::Elem {
        ModElem(GEN)
    }

    fn identity() -> Self::Elem {
        ModElem(1)
    }

    fn exp(base: &Self::Elem, e: &Self::Scalar) -> Self::Elem {
        ModElem(pow_mod(base.0, e.0, P))
    }

    fn mul(a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        ModElem(a.0 * b.0 % P)
    }

    fn encode_elem(e: &Self::Elem) -> Vec<u8> {
        u64_to_be(e.0, Self::ELEM_BYTES)
    }

    fn decode_elem(bytes: &[u8]) -> Result<Self::Elem, AlgebraError> {
        if bytes.len() != Self::ELEM_BYTES {
            return Err(AlgebraError::Decode(format!(
                "element must be {} bytes, got {}",
                Self::ELEM_BYTES,
                bytes.len()
            )));
        }
        let v = be_to_u64(bytes);
        if v == 0 || v >= P || pow_mod(v, Q, P) != 1 {
            return Err(AlgebraError::Decode(format!("{v} is not in the order-{Q} subgroup")));
        }
        Ok(ModElem(v))
    }

    fn encode_scalar(s: &Self::Scalar) -> Vec<u8> {
        u64_to_be(s.0, Self::SCALAR_BYTES)
    }

    fn decode_scalar(bytes: &[u8]) -> Result<Self::Scalar, AlgebraError> {
        if bytes.len() != Self::SCALAR_BYTES {
            return Err(AlgebraError::Decode(format!(
                "scalar must be {} bytes, got {}",
                Self::SCALAR_BYTES,
                bytes.len()
            )));
        }
        let v = be_to_u64(bytes);
        if v >= Q {
            return Err(AlgebraError::Decode(format!("scalar {v} not below {Q}")));
        }
        Ok(ModScalar(v))
    }

    fn scalar_in_range(bytes: &[u8]) -> bool {
        bytes.len() == Self::SCALAR_BYTES && be_to_u64(bytes) < Q
    }

    fn scalar_from_wide(bytes: &[u8]) -> Self::Scalar {
        // Horner evaluation keeps every intermediate below 2^8 * Q.
        ModScalar(bytes.iter().fold(0u64, |acc, &b| ((acc << 8) | u64::from(b)) % Q))
    }

    fn scalar_from_u64(v: u64) -> Self::Scalar {
        ModScalar(v % Q)
    }

    fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> Self::Scalar {
        ModScalar(rng.gen_range(1..Q))
    }
}
