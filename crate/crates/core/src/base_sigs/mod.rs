//! Building-block signatures: Schnorr with caller-supplied randomness, and a
//! hash-valued BLS variant used by the publicly detectable baseline.

mod bls;
mod schnorr;

pub use bls::{bls_sign, bls_verify, BlsSig, DEFAULT_BLS_BITS, TAG_BLS_HASH, TAG_BLS_OUT};
pub use schnorr::{schnorr_sign, schnorr_verify, SchnorrKeyPair, SchnorrSig, TAG_NONCE, TAG_SCH};
