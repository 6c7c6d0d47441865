//! Forging by an arbitrary subset of the designated detectors.
//!
//! None of the concrete schemes here supports this: the MDVS forgery needs
//! every designated secret. The trait fixes the shape a scheme with subset
//! forging would plug into, and [`AnySubsetForger`] turns it into a
//! [`Signer`] so `watmar` can produce the forged text.

use rand::RngCore;

use super::{BackendKind, Signer, WatermarkError};
use crate::oracles::{BitString, Token};

pub trait AnySubsetForge {
    type Public;
    type Secret;

    fn kind(&self) -> BackendKind;

    fn sig_bits(&self) -> usize;

    /// Signature bits on `digest` produced from the corrupted detectors'
    /// secrets and the honest detectors' public keys only.
    fn fge_as(
        &self,
        spk: &Self::Public,
        corrupted: &[Self::Secret],
        honest: &[Self::Public],
        digest: &[u8; 32],
        rng: &mut dyn RngCore,
    ) -> Result<BitString, WatermarkError>;
}

pub struct AnySubsetForger<F: AnySubsetForge> {
    pub scheme: F,
    pub spk: F::Public,
    pub corrupted: Vec<F::Secret>,
    pub honest: Vec<F::Public>,
}

impl<F: AnySubsetForge> Signer for AnySubsetForger<F> {
    fn kind(&self) -> BackendKind {
        self.scheme.kind()
    }

    fn sig_bits(&self) -> usize {
        self.scheme.sig_bits()
    }

    fn sign(&self, digest: &[u8; 32], _anchor: &[Token], rng: &mut dyn RngCore) -> Result<BitString, WatermarkError> {
        self.scheme
            .fge_as(&self.spk, &self.corrupted, &self.honest, digest, rng)
    }
}
