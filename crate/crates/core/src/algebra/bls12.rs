use ark_bls12_381::{Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::{BigInteger, Field, PrimeField, UniformRand};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use num_traits::Zero;
use rand::Rng;

use super::{hex_of, AlgebraError, Group, GroupId, GroupParams, PairingGroup, Scalar};

/// BLS12-381 presented as a symmetric-pairing group.
///
/// Elements are pairs `(g1^x, g2^x)`, i.e. the diagonal subgroup of G1 x G2,
/// which is cyclic of the same prime order r. The pairing of two diagonal
/// elements `e(a.g1, b.g2)` is then symmetric in its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prod128;

pub type Prod128Scalar = Fr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagElem {
    pub g1: G1Projective,
    pub g2: G2Projective,
}

const G1_BYTES: usize = 48;
const G2_BYTES: usize = 96;
const GT_BYTES: usize = 576;

impl Scalar for Fr {
    fn invert(&self) -> Option<Self> {
        self.inverse()
    }
}

fn modulus_be() -> Vec<u8> {
    Fr::MODULUS.to_bytes_be()
}

impl Group for Prod128 {
    type Scalar = Fr;
    type Elem = DiagElem;

    const ID: GroupId = GroupId::Prod128;
    const SCALAR_BYTES: usize = 32;
    const ELEM_BYTES: usize = G1_BYTES + G2_BYTES;

    fn params() -> GroupParams {
        GroupParams {
            id: Self::ID,
            modulus: "bls12_381".to_string(),
            order: Fr::MODULUS.to_string(),
            generator: hex_of(&Self::encode_elem(&Self::generator())),
            scalar_bytes: Self::SCALAR_BYTES,
            elem_bytes: Self::ELEM_BYTES,
            pairing_available: true,
        }
    }

    fn generator() -> DiagElem {
        DiagElem {
            g1: G1Projective::generator(),
            g2: G2Projective::generator(),
        }
    }

    fn identity() -> DiagElem {
        DiagElem {
            g1: G1Projective::zero(),
            g2: G2Projective::zero(),
        }
    }

    fn exp(base: &DiagElem, e: &Fr) -> DiagElem {
        DiagElem {
            g1: base.g1 * e,
            g2: base.g2 * e,
        }
    }

    fn mul(a: &DiagElem, b: &DiagElem) -> DiagElem {
        DiagElem {
            g1: a.g1 + b.g1,
            g2: a.g2 + b.g2,
        }
    }

    fn encode_elem(e: &DiagElem) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::ELEM_BYTES);
        e.g1.into_affine()
            .serialize_compressed(&mut out)
            .expect("writing to a Vec cannot fail");
        e.g2.into_affine()
            .serialize_compressed(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }

    fn decode_elem(bytes: &[u8]) -> Result<DiagElem, AlgebraError> {
        if bytes.len() != Self::ELEM_BYTES {
            return Err(AlgebraError::Decode(format!(
                "element must be {} bytes, got {}",
                Self::ELEM_BYTES,
                bytes.len()
            )));
        }
        // deserialize_compressed checks curve and subgroup membership
        let g1 = G1Affine::deserialize_compressed(&bytes[..G1_BYTES])
            .map_err(|e| AlgebraError::Decode(format!("G1 half: {e}")))?;
        let g2 = G2Affine::deserialize_compressed(&bytes[G1_BYTES..])
            .map_err(|e| AlgebraError::Decode(format!("G2 half: {e}")))?;
        // same discrete log in both halves: e(a1, g2) = e(g1, a2)
        let lhs = Bls12_381::pairing(g1, G2Affine::generator());
        let rhs = Bls12_381::pairing(G1Affine::generator(), g2);
        if lhs != rhs {
            return Err(AlgebraError::Decode("halves are not on the diagonal".into()));
        }
        Ok(DiagElem {
            g1: g1.into(),
            g2: g2.into(),
        })
    }

    fn encode_scalar(s: &Fr) -> Vec<u8> {
        s.into_bigint().to_bytes_be()
    }

    fn decode_scalar(bytes: &[u8]) -> Result<Fr, AlgebraError> {
        if !Self::scalar_in_range(bytes) {
            return Err(AlgebraError::Decode(
                "scalar is not a canonical 32-byte value below r".into(),
            ));
        }
        Ok(Fr::from_be_bytes_mod_order(bytes))
    }

    fn scalar_in_range(bytes: &[u8]) -> bool {
        bytes.len() == Self::SCALAR_BYTES && bytes < modulus_be().as_slice()
    }

    fn scalar_from_wide(bytes: &[u8]) -> Fr {
        Fr::from_be_bytes_mod_order(bytes)
    }

    fn scalar_from_u64(v: u64) -> Fr {
        Fr::from(v)
    }

    fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> Fr {
        loop {
            let s = Fr::rand(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }
}

impl PairingGroup for Prod128 {
    type Gt = PairingOutput<Bls12_381>;

    fn pair(a: &DiagElem, b: &DiagElem) -> Self::Gt {
        Bls12_381::pairing(a.g1, b.g2)
    }

    fn gt_identity() -> Self::Gt {
        PairingOutput::zero()
    }

    fn gt_exp(x: &Self::Gt, e: &Fr) -> Self::Gt {
        *x * e
    }

    fn encode_gt(x: &Self::Gt) -> Vec<u8> {
        let mut out = Vec::with_capacity(GT_BYTES);
        x.serialize_compressed(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    fn decode_gt(bytes: &[u8]) -> Result<Self::Gt, AlgebraError> {
        if bytes.len() != GT_BYTES {
            return Err(AlgebraError::Decode(format!("Gt element must be {GT_BYTES} bytes")));
        }
        PairingOutput::deserialize_compressed(bytes).map_err(|e| AlgebraError::Decode(format!("Gt: {e}")))
    }
}
