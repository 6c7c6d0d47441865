use rand::RngCore;

use super::backends::{CmdvsForger, MdvsForger};
use super::{BackendKind, Signer, WatermarkError, WatermarkParams};
use crate::algebra::Group;
use crate::mdvs::VerifierSet;
use crate::model::LanguageModel;
use crate::oracles::{BlockOracles, Token};

/// What `watmar_traced` did, for layout and rejection-rate checks.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbedTrace {
    pub tokens: Vec<Token>,
    /// Offset of each anchor block.
    pub anchors: Vec<usize>,
    /// Model calls spent on each carrier block, accepted call included.
    pub attempts: Vec<u32>,
}

pub fn watmar<S, M>(
    params: &WatermarkParams,
    signer: &S,
    model: &mut M,
    prompt: &[Token],
    rng: &mut dyn RngCore,
) -> Result<Vec<Token>, WatermarkError>
where
    S: Signer + ?Sized,
    M: LanguageModel + ?Sized,
{
    watmar_traced(params, signer, model, prompt, rng).map(|t| t.tokens)
}

pub fn watmar_traced<S, M>(
    params: &WatermarkParams,
    signer: &S,
    model: &mut M,
    prompt: &[Token],
    rng: &mut dyn RngCore,
) -> Result<EmbedTrace, WatermarkError>
where
    S: Signer + ?Sized,
    M: LanguageModel + ?Sized,
{
    params.check_backend(signer.kind(), signer.sig_bits())?;
    if model.vocab_size() != params.vocab {
        return Err(WatermarkError::Params(format!(
            "model vocabulary {} differs from parameters' {}",
            model.vocab_size(),
            params.vocab
        )));
    }
    let ell = params.ell;
    let oracles = BlockOracles::new(ell);
    let mut trace = EmbedTrace::default();
    let t = &mut trace.tokens;

    while t.len() + ell + ell * params.len_sig < params.n {
        let anchor = model.gen_block(prompt, t, ell)?;
        trace.anchors.push(t.len());
        t.extend_from_slice(&anchor);

        let digest = oracles.h1_message(&anchor)?;
        let mut sigma = signer.sign(&digest, &anchor, rng)?;
        if params.backend.masked() {
            sigma = sigma.xor(&oracles.h2_mask(&anchor, params.len_sig)?)?;
        }

        let mut chain = oracles.h3_chain();
        for (bit_index, bit) in sigma.iter().enumerate() {
            let mut attempts = 0;
            let block = loop {
                if attempts == params.max_attempts {
                    return Err(WatermarkError::LowEntropyModel {
                        watermark: trace.anchors.len() - 1,
                        bit: bit_index,
                        attempts,
                    });
                }
                attempts += 1;
                let x = model.gen_block(prompt, t, ell)?;
                if chain.bit_for(&x) == bit {
                    break x;
                }
            };
            trace.attempts.push(attempts);
            chain.push(&block, bit);
            t.extend_from_slice(&block);
        }
    }

    while t.len() < params.n {
        let len = ell.min(params.n - t.len());
        let block = model.gen_block(prompt, t, len)?;
        t.extend_from_slice(&block);
    }
    Ok(trace)
}

/// Designated-set forgery of a whole text: `watmar` with the detectors'
/// secrets standing in for the signer key. `spk` is the signer's MDVS key.
pub fn forge_ds<G, M>(
    params: &WatermarkParams,
    spk: &G::Elem,
    vsks: &[G::Scalar],
    set: &VerifierSet<G>,
    model: &mut M,
    prompt: &[Token],
    rng: &mut dyn RngCore,
) -> Result<Vec<Token>, WatermarkError>
where
    G: Group,
    M: LanguageModel + ?Sized,
{
    match params.backend {
        BackendKind::Mdvs => {
            let forger = MdvsForger::new(*spk, vsks.to_vec(), set)?;
            watmar(params, &forger, model, prompt, rng)
        }
        BackendKind::Cmdvs => {
            let forger = CmdvsForger::new(*spk, vsks.to_vec(), set)?;
            watmar(params, &forger, model, prompt, rng)
        }
        other => Err(WatermarkError::BackendUnsupported(other)),
    }
}
