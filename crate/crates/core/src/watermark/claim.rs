use super::detect::extract_signature;
use super::{BackendKind, WatermarkError, WatermarkParams};
use crate::algebra::Group;
use crate::cmdvs::{cmdvs_claim, cmdvs_clm_ver, CmdvsClaim, CmdvsPublicKey, CmdvsSignature, CmdvsSignerKey};
use crate::mdvs::VerifierSet;
use crate::oracles::Token;

/// A claim for the watermark whose anchor sits at `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotClaim<G: Group> {
    pub offset: usize,
    pub claim: CmdvsClaim<G>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextClaimProof<G: Group> {
    pub proofs: Vec<SlotClaim<G>>,
}

impl<G: Group> Default for TextClaimProof<G> {
    fn default() -> Self {
        TextClaimProof { proofs: Vec::new() }
    }
}

fn signature_at<G: Group>(params: &WatermarkParams, tokens: &[Token], offset: usize) -> Option<CmdvsSignature<G>> {
    let (_, bits) = extract_signature(params, tokens, offset).ok()??;
    CmdvsSignature::from_bits(&bits).ok()
}

fn require_cmdvs(params: &WatermarkParams) -> Result<(), WatermarkError> {
    if params.backend != BackendKind::Cmdvs {
        return Err(WatermarkError::BackendUnsupported(params.backend));
    }
    Ok(())
}

/// Claims every watermark slot `0, W, 2W, ...` that this key produced.
pub fn claim_text<G: Group>(
    params: &WatermarkParams,
    sk: &CmdvsSignerKey<G>,
    set: &VerifierSet<G>,
    tokens: &[Token],
) -> Result<TextClaimProof<G>, WatermarkError> {
    require_cmdvs(params)?;
    params.check_backend(BackendKind::Cmdvs, CmdvsSignature::<G>::BITS)?;
    let w = params.window();
    let proofs = (0..)
        .map(|i| i * w)
        .take_while(|&offset| offset + w <= tokens.len())
        .filter_map(|offset| {
            let sig = signature_at::<G>(params, tokens, offset)?;
            cmdvs_claim(sk, set, &sig).map(|claim| SlotClaim { offset, claim })
        })
        .collect();
    Ok(TextClaimProof { proofs })
}

/// Accepts if any listed slot's claim verifies.
pub fn clmver_text<G: Group>(
    params: &WatermarkParams,
    pk: &CmdvsPublicKey<G>,
    set: &VerifierSet<G>,
    tokens: &[Token],
    proof: &TextClaimProof<G>,
) -> Result<bool, WatermarkError> {
    require_cmdvs(params)?;
    params.check_backend(BackendKind::Cmdvs, CmdvsSignature::<G>::BITS)?;
    Ok(proof.proofs.iter().any(|slot| {
        signature_at::<G>(params, tokens, slot.offset).is_some_and(|sig| cmdvs_clm_ver(pk, set, &sig, &slot.claim))
    }))
}
