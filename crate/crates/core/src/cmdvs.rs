//! Claimable MDVS: an MDVS signature plus a commitment to a Schnorr signature
//! on it, with all randomness derived from a PRF key so the signer can later
//! reopen the commitment.
//!
//! With `spk = enc(spk_sig) || enc(spk_mdvs)` and `s = spk || bytes(sigma_mdvs)`:
//!
//! * `r_sig    = PRF(k, s || 0x00)`
//! * `sigma_sig = Schnorr(ssk_sig, s; r_sig)`
//! * `r_commit = PRF(k, s || 0x01)`
//! * `com      = Commit(spk || enc(S) || bytes(sigma_sig); r_commit)`

use rand::Rng;

use crate::algebra::{AlgebraError, Group};
use crate::base_sigs::{schnorr_sign, schnorr_verify, SchnorrKeyPair, SchnorrSig};
use crate::mdvs::{mdvs_sign_with, mdvs_verify, MdvsError, MdvsKeyPair, MdvsSignature, SignNonces, VerifierSet};
use crate::oracles::{commit, decommit, prf_eval, BitString, Commitment, PrfKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CmdvsSignerKey<G: Group> {
    pub prf_key: PrfKey,
    pub sig: SchnorrKeyPair<G>,
    pub mdvs: MdvsKeyPair<G>,
}

impl<G: Group> CmdvsSignerKey<G> {
    pub fn generate<R: Rng + ?Sized>(rng: &mut R) -> Self {
        CmdvsSignerKey {
            prf_key: PrfKey::random(rng),
            sig: SchnorrKeyPair::generate(rng),
            mdvs: MdvsKeyPair::generate(rng),
        }
    }

    pub fn public(&self) -> CmdvsPublicKey<G> {
        CmdvsPublicKey {
            spk_sig: self.sig.pk,
            spk_mdvs: self.mdvs.pk,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CmdvsPublicKey<G: Group> {
    pub spk_sig: G::Elem,
    pub spk_mdvs: G::Elem,
}

impl<G: Group> CmdvsPublicKey<G> {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = G::encode_elem(&self.spk_sig);
        out.extend(G::encode_elem(&self.spk_mdvs));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CmdvsSignature<G: Group> {
    pub inner: MdvsSignature<G>,
    pub com: Commitment,
}

impl<G: Group> CmdvsSignature<G> {
    pub const BITS: usize = MdvsSignature::<G>::BITS + 256;

    /// `bits(inner) || com`.
    pub fn to_bits(&self) -> BitString {
        let mut bits = self.inner.to_bits();
        bits.extend(&BitString::from_bytes(&self.com.0, 256));
        bits
    }

    pub fn from_bits(bits: &BitString) -> Result<Self, MdvsError> {
        if bits.len() != Self::BITS {
            return Err(MdvsError::WrongLength {
                expected: Self::BITS,
                got: bits.len(),
            });
        }
        let split = MdvsSignature::<G>::BITS;
        let inner = MdvsSignature::from_bits(&bits.slice(0, split))?;
        let com: [u8; 32] = bits.slice(split, bits.len()).to_bytes().try_into().expect("256 bits");
        Ok(CmdvsSignature {
            inner,
            com: Commitment(com),
        })
    }
}

/// Opening of a signature's commitment: `(r_commit, sigma_sig)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CmdvsClaim<G: Group> {
    pub r_commit: [u8; 32],
    pub sigma_sig: SchnorrSig<G>,
}

impl<G: Group> CmdvsClaim<G> {
    pub fn sigma_sig_bytes(&self) -> Vec<u8> {
        self.sigma_sig.to_bytes()
    }

    pub fn from_parts(r_commit: &[u8], sigma_sig: &[u8]) -> Result<Self, AlgebraError> {
        let r_commit: [u8; 32] = r_commit
            .try_into()
            .map_err(|_| AlgebraError::Decode(format!("r_commit must be 32 bytes, got {}", r_commit.len())))?;
        Ok(CmdvsClaim {
            r_commit,
            sigma_sig: SchnorrSig::from_bytes(sigma_sig)?,
        })
    }
}

fn signed_payload<G: Group>(pk: &CmdvsPublicKey<G>, inner: &MdvsSignature<G>) -> Vec<u8> {
    let mut s = pk.encode();
    s.extend(inner.to_bytes());
    s
}

fn commit_payload<G: Group>(pk: &CmdvsPublicKey<G>, set: &VerifierSet<G>, sigma_sig: &SchnorrSig<G>) -> Vec<u8> {
    let mut msg = pk.encode();
    msg.extend(set.encode());
    msg.extend(sigma_sig.to_bytes());
    msg
}

fn prf_with_tag(key: &PrfKey, payload: &[u8], tag: u8) -> [u8; 32] {
    let mut input = payload.to_vec();
    input.push(tag);
    prf_eval(key, &input)
}

/// Recompute `(sigma_sig, r_commit)` for an inner signature under `sk`.
fn derive_opening<G: Group>(sk: &CmdvsSignerKey<G>, inner: &MdvsSignature<G>) -> (SchnorrSig<G>, [u8; 32]) {
    let payload = signed_payload(&sk.public(), inner);
    let r_sig = prf_with_tag(&sk.prf_key, &payload, 0x00);
    let sigma_sig = schnorr_sign(&sk.sig, &payload, &r_sig);
    (sigma_sig, prf_with_tag(&sk.prf_key, &payload, 0x01))
}

pub fn cmdvs_sign<G: Group, R: Rng + ?Sized>(
    sk: &CmdvsSignerKey<G>,
    set: &VerifierSet<G>,
    m: &[u8],
    rng: &mut R,
) -> CmdvsSignature<G> {
    cmdvs_sign_with(sk, set, m, &SignNonces::sample(rng))
}

/// Signing with explicit MDVS nonces; everything else is derived from `sk`.
pub fn cmdvs_sign_with<G: Group>(
    sk: &CmdvsSignerKey<G>,
    set: &VerifierSet<G>,
    m: &[u8],
    nonces: &SignNonces<G>,
) -> CmdvsSignature<G> {
    let inner = mdvs_sign_with(&sk.mdvs, set, m, nonces);
    let (sigma_sig, r_commit) = derive_opening(sk, &inner);
    let com = commit(&commit_payload(&sk.public(), set, &sigma_sig), &r_commit);
    CmdvsSignature { inner, com }
}

/// MDVS verification of the inner signature; `com` plays no part.
pub fn cmdvs_verify<G: Group>(
    pk: &CmdvsPublicKey<G>,
    vsk: &G::Scalar,
    set: &VerifierSet<G>,
    m: &[u8],
    sig: &CmdvsSignature<G>,
) -> bool {
    mdvs_verify(&pk.spk_mdvs, vsk, set, m, &sig.inner)
}

/// `None` if `sig` was not produced under `sk`.
pub fn cmdvs_claim<G: Group>(
    sk: &CmdvsSignerKey<G>,
    set: &VerifierSet<G>,
    sig: &CmdvsSignature<G>,
) -> Option<CmdvsClaim<G>> {
    let (sigma_sig, r_commit) = derive_opening(sk, &sig.inner);
    decommit(&sig.com, &r_commit, &commit_payload(&sk.public(), set, &sigma_sig))
        .then_some(CmdvsClaim { r_commit, sigma_sig })
}

pub fn cmdvs_clm_ver<G: Group>(
    pk: &CmdvsPublicKey<G>,
    set: &VerifierSet<G>,
    sig: &CmdvsSignature<G>,
    claim: &CmdvsClaim<G>,
) -> bool {
    decommit(&sig.com, &claim.r_commit, &commit_payload(pk, set, &claim.sigma_sig))
        && schnorr_verify(&pk.spk_sig, &signed_payload(pk, &sig.inner), &claim.sigma_sig)
}
