//! Multi-designated-detector watermarking over token streams.
//!
//! A watermark is `len_sig + 1` blocks of `l` tokens: an anchor block `a`,
//! followed by one carrier block per signature bit. The signed message is
//! `H1(a)`. Each carrier block `x_j` is resampled from the model until
//! `H3(x_1, b_1, ..., x_{j-1}, b_{j-1}, x_j) = b_j`, where `b` is the signature
//! (masked with `H2(a)` for the MDVS-based backends). Watermarks are laid out
//! back to back from the start of the generated text while
//! `|t| + l + l * len_sig < n`, then the text is padded with plain model output.
//!
//! Detection slides a window of `W = (len_sig + 1) * l` tokens over every
//! offset of the candidate, re-derives the bits, and asks the backend to verify.
//!
//! Backends:
//!
//! | kind    | signature                     | masked | detected with            |
//! |---------|-------------------------------|--------|--------------------------|
//! | `mdvs`  | MDVS `c1 c2 z1 z2`            | yes    | a designated secret key  |
//! | `cmdvs` | MDVS bits, then the 256-bit commitment | yes | a designated secret key |
//! | `ddw`   | DVS tag `s`, `r` from the anchor | no  | the designated secret key |
//! | `pdw`   | hash-valued BLS               | no     | the signer's public key  |

mod any_subset;
mod backends;
mod claim;
mod detect;
mod embed;
mod nolap;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mdvs::MdvsError;
use crate::model::ModelError;
use crate::oracles::{BitString, OracleError, Token};

pub use any_subset::{AnySubsetForge, AnySubsetForger};
pub use backends::{
    CmdvsDetector, CmdvsForger, CmdvsSigner, DdwDetector, DdwForger, DdwSigner, MdvsDetector, MdvsForger, MdvsSigner,
    PdwDetector, PdwSigner,
};
pub use claim::{claim_text, clmver_text, SlotClaim, TextClaimProof};
pub use detect::{detect, extract_signature};
pub use embed::{forge_ds, watmar, watmar_traced, EmbedTrace};
pub use nolap::nolap_k;

/// Rejection cap per carrier block.
pub const DEFAULT_MAX_ATTEMPTS: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Mdvs,
    Cmdvs,
    Ddw,
    Pdw,
}

impl BackendKind {
    /// Whether signature bits are XOR-masked with `H2(anchor)` before embedding.
    pub fn masked(self) -> bool {
        matches!(self, BackendKind::Mdvs | BackendKind::Cmdvs)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Mdvs => "mdvs",
            BackendKind::Cmdvs => "cmdvs",
            BackendKind::Ddw => "ddw",
            BackendKind::Pdw => "pdw",
        }
    }
}

impl std::fmt::Display for BackendKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BackendKind {
    type Err = WatermarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mdvs" => Ok(BackendKind::Mdvs),
            "cmdvs" => Ok(BackendKind::Cmdvs),
            "ddw" => Ok(BackendKind::Ddw),
            "pdw" => Ok(BackendKind::Pdw),
            other => Err(WatermarkError::Params(format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WatermarkParams {
    /// Output length in tokens.
    pub n: usize,
    /// Block length.
    pub ell: usize,
    /// Embedded bits per watermark; fixed by the backend.
    pub len_sig: usize,
    pub vocab: u32,
    pub max_attempts: u32,
    pub backend: BackendKind,
}

impl WatermarkParams {
    pub fn new(n: usize, ell: usize, vocab: u32, backend: BackendKind, len_sig: usize) -> Self {
        WatermarkParams {
            n,
            ell,
            len_sig,
            vocab,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            backend,
        }
    }

    /// Tokens occupied by one watermark.
    pub fn window(&self) -> usize {
        (self.len_sig + 1) * self.ell
    }

    /// Watermarks that `watmar` fits into `n` tokens.
    pub fn watermark_count(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            (self.n - 1) / self.window()
        }
    }

    pub fn validate(&self) -> Result<(), WatermarkError> {
        if self.ell == 0 || self.len_sig == 0 {
            return Err(WatermarkError::Params(
                "block length and len_sig must be positive".into(),
            ));
        }
        if self.max_attempts == 0 {
            return Err(WatermarkError::Params("max_attempts must be positive".into()));
        }
        if self.vocab < 2 {
            return Err(WatermarkError::Params("vocabulary needs at least two tokens".into()));
        }
        Ok(())
    }

    fn check_backend(&self, kind: BackendKind, bits: usize) -> Result<(), WatermarkError> {
        self.validate()?;
        if kind != self.backend {
            return Err(WatermarkError::Params(format!(
                "parameters name backend {}, keys are for {kind}",
                self.backend
            )));
        }
        if bits != self.len_sig {
            return Err(WatermarkError::Params(format!(
                "len_sig is {}, backend signatures have {bits} bits",
                self.len_sig
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum WatermarkError {
    #[error("model did not hit the target bit within {attempts} attempts (watermark {watermark}, bit {bit})")]
    LowEntropyModel {
        watermark: usize,
        bit: usize,
        attempts: u32,
    },
    #[error("operation not supported by backend {0}")]
    BackendUnsupported(BackendKind),
    #[error("detector secrets do not match the designated set")]
    IncompleteSecrets,
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Mdvs(#[from] MdvsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectResult {
    pub detected: bool,
    pub offset: Option<usize>,
    pub backend: BackendKind,
}

/// Signing side of a backend.
pub trait Signer {
    fn kind(&self) -> BackendKind;

    fn sig_bits(&self) -> usize;

    /// Unmasked signature bits on the anchor digest. `anchor` is the raw block,
    /// which the DVS backend uses as its context.
    fn sign(&self, digest: &[u8; 32], anchor: &[Token], rng: &mut dyn RngCore) -> Result<BitString, WatermarkError>;
}

/// Detection side of a backend.
pub trait Detector {
    fn kind(&self) -> BackendKind;

    fn sig_bits(&self) -> usize;

    fn verify(&self, digest: &[u8; 32], anchor: &[Token], bits: &BitString) -> bool;

    /// Bit granularity at which [`Detector::prefix_plausible`] is consulted;
    /// zero disables it.
    fn prefix_stride(&self) -> usize {
        0
    }

    /// Cheap necessary condition on a prefix of the unmasked bits, called
    /// whenever the prefix length is a multiple of the stride. Earlier calls on
    /// the same extraction have already returned true.
    fn prefix_plausible(&self, _prefix: &BitString) -> bool {
        true
    }
}

impl<S: Signer + ?Sized> Signer for &S {
    fn kind(&self) -> BackendKind {
        (**self).kind()
    }
    fn sig_bits(&self) -> usize {
        (**self).sig_bits()
    }
    fn sign(&self, digest: &[u8; 32], anchor: &[Token], rng: &mut dyn RngCore) -> Result<BitString, WatermarkError> {
        (**self).sign(digest, anchor, rng)
    }
}

impl<D: Detector + ?Sized> Detector for &D {
    fn kind(&self) -> BackendKind {
        (**self).kind()
    }
    fn sig_bits(&self) -> usize {
        (**self).sig_bits()
    }
    fn verify(&self, digest: &[u8; 32], anchor: &[Token], bits: &BitString) -> bool {
        (**self).verify(digest, anchor, bits)
    }
    fn prefix_stride(&self) -> usize {
        (**self).prefix_stride()
    }
    fn prefix_plausible(&self, prefix: &BitString) -> bool {
        (**self).prefix_plausible(prefix)
    }
}
