use rand::RngCore;

use super::{BackendKind, Detector, Signer, WatermarkError};
use crate::algebra::{Group, PairingGroup};
use crate::base_sigs::{bls_sign, bls_verify, BlsSig};
use crate::cmdvs::{cmdvs_sign, CmdvsPublicKey, CmdvsSignature, CmdvsSignerKey};
use crate::dvs::{derive_r, dvs_sign, dvs_verify, verifier_tag, DvsMode, DvsSig};
use crate::mdvs::{mdvs_fge_ds, mdvs_sign, MdvsKeyPair, MdvsSignature, MdvsVerifier, VerifierSet};
use crate::oracles::{encode_tokens_unchecked, BitString, Commitment, Token};

/// Whether the most recent complete scalar chunk of `prefix` is a canonical
/// scalar. Only the first four chunks (the MDVS part) are checked.
fn scalar_chunk_ok<G: Group>(prefix: &BitString) -> bool {
    let width = 8 * G::SCALAR_BYTES;
    let end = prefix.len();
    if end == 0 || !end.is_multiple_of(width) || end > MdvsSignature::<G>::BITS {
        return true;
    }
    G::scalar_in_range(&prefix.slice(end - width, end).to_bytes())
}

fn set_matches_secrets<G: Group>(set: &VerifierSet<G>, vsks: &[G::Scalar]) -> Result<(), WatermarkError> {
    let pks: Vec<G::Elem> = vsks.iter().map(G::exp_g).collect();
    match VerifierSet::new(&pks) {
        Ok(s) if s == *set => Ok(()),
        _ => Err(WatermarkError::IncompleteSecrets),
    }
}

pub struct MdvsSigner<G: Group> {
    key: MdvsKeyPair<G>,
    set: VerifierSet<G>,
}

impl<G: Group> MdvsSigner<G> {
    pub fn new(key: MdvsKeyPair<G>, set: VerifierSet<G>) -> Self {
        MdvsSigner { key, set }
    }
}

impl<G: Group> Signer for MdvsSigner<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Mdvs
    }
    fn sig_bits(&self) -> usize {
        MdvsSignature::<G>::BITS
    }
    fn sign(&self, digest: &[u8; 32], _anchor: &[Token], rng: &mut dyn RngCore) -> Result<BitString, WatermarkError> {
        Ok(mdvs_sign(&self.key, &self.set, digest, rng).to_bits())
    }
}

/// Signs with the designated detectors' secrets instead of the signer key.
pub struct MdvsForger<G: Group> {
    spk: G::Elem,
    vsks: Vec<G::Scalar>,
}

impl<G: Group> MdvsForger<G> {
    /// Fails unless `vsks` are exactly the secrets behind `set`.
    pub fn new(spk: G::Elem, vsks: Vec<G::Scalar>, set: &VerifierSet<G>) -> Result<Self, WatermarkError> {
        set_matches_secrets(set, &vsks)?;
        Ok(MdvsForger { spk, vsks })
    }
}

impl<G: Group> Signer for MdvsForger<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Mdvs
    }
    fn sig_bits(&self) -> usize {
        MdvsSignature::<G>::BITS
    }
    fn sign(&self, digest: &[u8; 32], _anchor: &[Token], rng: &mut dyn RngCore) -> Result<BitString, WatermarkError> {
        Ok(mdvs_fge_ds::<G, _>(&self.spk, &self.vsks, digest, rng)?.to_bits())
    }
}

pub struct MdvsDetector<G: Group> {
    verifier: MdvsVerifier<G>,
}

impl<G: Group> MdvsDetector<G> {
    pub fn new(spk: G::Elem, vsk: &G::Scalar, set: VerifierSet<G>) -> Result<Self, WatermarkError> {
        Ok(MdvsDetector {
            verifier: MdvsVerifier::new(spk, vsk, set)?,
        })
    }
}

impl<G: Group> Detector for MdvsDetector<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Mdvs
    }
    fn sig_bits(&self) -> usize {
        MdvsSignature::<G>::BITS
    }
    fn verify(&self, digest: &[u8; 32], _anchor: &[Token], bits: &BitString) -> bool {
        MdvsSignature::<G>::from_bits(bits).is_ok_and(|sig| self.verifier.verify(digest, &sig))
    }
    fn prefix_stride(&self) -> usize {
        8 * G::SCALAR_BYTES
    }
    fn prefix_plausible(&self, prefix: &BitString) -> bool {
        scalar_chunk_ok::<G>(prefix)
    }
}

pub struct CmdvsSigner<G: Group> {
    key: CmdvsSignerKey<G>,
    set: VerifierSet<G>,
}

impl<G: Group> CmdvsSigner<G> {
    pub fn new(key: CmdvsSignerKey<G>, set: VerifierSet<G>) -> Self {
        CmdvsSigner { key, set }
    }
}

impl<G: Group> Signer for CmdvsSigner<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Cmdvs
    }
    fn sig_bits(&self) -> usize {
        CmdvsSignature::<G>::BITS
    }
    fn sign(&self, digest: &[u8; 32], _anchor: &[Token], rng: &mut dyn RngCore) -> Result<BitString, WatermarkError> {
        Ok(cmdvs_sign(&self.key, &self.set, digest, rng).to_bits())
    }
}

/// Forged inner signature with a uniformly random commitment.
pub struct CmdvsForger<G: Group> {
    inner: MdvsForger<G>,
}

impl<G: Group> CmdvsForger<G> {
    pub fn new(spk_mdvs: G::Elem, vsks: Vec<G::Scalar>, set: &VerifierSet<G>) -> Result<Self, WatermarkError> {
        Ok(CmdvsForger {
            inner: MdvsForger::new(spk_mdvs, vsks, set)?,
        })
    }
}

impl<G: Group> Signer for CmdvsForger<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Cmdvs
    }
    fn sig_bits(&self) -> usize {
        CmdvsSignature::<G>::BITS
    }
    fn sign(&self, digest: &[u8; 32], anchor: &[Token], rng: &mut dyn RngCore) -> Result<BitString, WatermarkError> {
        let inner = MdvsSignature::<G>::from_bits(&self.inner.sign(digest, anchor, rng)?)?;
        let mut com = [0u8; 32];
        rng.fill_bytes(&mut com);
        Ok(CmdvsSignature {
            inner,
            com: Commitment(com),
        }
        .to_bits())
    }
}

pub struct CmdvsDetector<G: Group> {
    inner: MdvsDetector<G>,
}

impl<G: Group> CmdvsDetector<G> {
    pub fn new(pk: &CmdvsPublicKey<G>, vsk: &G::Scalar, set: VerifierSet<G>) -> Result<Self, WatermarkError> {
        Ok(CmdvsDetector {
            inner: MdvsDetector::new(pk.spk_mdvs, vsk, set)?,
        })
    }
}

impl<G: Group> Detector for CmdvsDetector<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Cmdvs
    }
    fn sig_bits(&self) -> usize {
        CmdvsSignature::<G>::BITS
    }
    fn verify(&self, digest: &[u8; 32], anchor: &[Token], bits: &BitString) -> bool {
        let split = MdvsSignature::<G>::BITS;
        bits.len() == self.sig_bits() && self.inner.verify(digest, anchor, &bits.slice(0, split))
    }
    fn prefix_stride(&self) -> usize {
        8 * G::SCALAR_BYTES
    }
    fn prefix_plausible(&self, prefix: &BitString) -> bool {
        scalar_chunk_ok::<G>(prefix)
    }
}

/// DVS in s-only mode, with the anchor block's token encoding as context.
pub struct DdwSigner<G: PairingGroup> {
    ssk: G::Scalar,
    vpk: G::Elem,
    bits: usize,
}

impl<G: PairingGroup> DdwSigner<G> {
    pub fn new(ssk: G::Scalar, vpk: G::Elem, bits: usize) -> Self {
        DdwSigner { ssk, vpk, bits }
    }
}

impl<G: PairingGroup> Signer for DdwSigner<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Ddw
    }
    fn sig_bits(&self) -> usize {
        self.bits
    }
    fn sign(&self, digest: &[u8; 32], anchor: &[Token], rng: &mut dyn RngCore) -> Result<BitString, WatermarkError> {
        let ctx = encode_tokens_unchecked(anchor);
        Ok(dvs_sign::<G, _>(&self.ssk, &self.vpk, digest, DvsMode::SOnly(&ctx), self.bits, rng).s)
    }
}

/// The designated detector producing the same tags from its own secret.
pub struct DdwForger<G: PairingGroup> {
    spk: G::Elem,
    vsk: G::Scalar,
    bits: usize,
}

impl<G: PairingGroup> DdwForger<G> {
    pub fn new(spk: G::Elem, vsk: G::Scalar, bits: usize) -> Self {
        DdwForger { spk, vsk, bits }
    }
}

impl<G: PairingGroup> Signer for DdwForger<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Ddw
    }
    fn sig_bits(&self) -> usize {
        self.bits
    }
    fn sign(&self, digest: &[u8; 32], anchor: &[Token], _rng: &mut dyn RngCore) -> Result<BitString, WatermarkError> {
        let r = derive_r(&encode_tokens_unchecked(anchor));
        Ok(verifier_tag::<G>(&self.spk, &self.vsk, &r, digest, self.bits))
    }
}

pub struct DdwDetector<G: PairingGroup> {
    spk: G::Elem,
    vsk: G::Scalar,
    bits: usize,
}

impl<G: PairingGroup> DdwDetector<G> {
    pub fn new(spk: G::Elem, vsk: G::Scalar, bits: usize) -> Self {
        DdwDetector { spk, vsk, bits }
    }
}

impl<G: PairingGroup> Detector for DdwDetector<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Ddw
    }
    fn sig_bits(&self) -> usize {
        self.bits
    }
    fn verify(&self, digest: &[u8; 32], anchor: &[Token], bits: &BitString) -> bool {
        let ctx = encode_tokens_unchecked(anchor);
        let sig = DvsSig {
            r: None,
            s: bits.clone(),
        };
        dvs_verify::<G>(&self.spk, &self.vsk, digest, &sig, DvsMode::SOnly(&ctx))
    }
}

/// Publicly detectable baseline: hash-valued BLS, checked with the public key.
pub struct PdwSigner<G: PairingGroup> {
    sk: G::Scalar,
    bits: usize,
}

impl<G: PairingGroup> PdwSigner<G> {
    pub fn new(sk: G::Scalar, bits: usize) -> Self {
        PdwSigner { sk, bits }
    }
}

impl<G: PairingGroup> Signer for PdwSigner<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Pdw
    }
    fn sig_bits(&self) -> usize {
        self.bits
    }
    fn sign(&self, digest: &[u8; 32], _anchor: &[Token], _rng: &mut dyn RngCore) -> Result<BitString, WatermarkError> {
        Ok(bls_sign::<G>(&self.sk, digest, self.bits).s)
    }
}

pub struct PdwDetector<G: PairingGroup> {
    pk: G::Elem,
    bits: usize,
}

impl<G: PairingGroup> PdwDetector<G> {
    pub fn new(pk: G::Elem, bits: usize) -> Self {
        PdwDetector { pk, bits }
    }
}

impl<G: PairingGroup> Detector for PdwDetector<G> {
    fn kind(&self) -> BackendKind {
        BackendKind::Pdw
    }
    fn sig_bits(&self) -> usize {
        self.bits
    }
    fn verify(&self, digest: &[u8; 32], _anchor: &[Token], bits: &BitString) -> bool {
        bits.len() == self.bits && bls_verify::<G>(&self.pk, digest, &BlsSig { s: bits.clone() })
    }
}
