use super::{DetectResult, Detector, WatermarkError, WatermarkParams};
use crate::oracles::{BitString, BlockOracles, OracleError, Token};

/// Anchor digest and unmasked signature bits of the watermark window at
/// `offset`; `None` if the window does not fit.
pub fn extract_signature(
    params: &WatermarkParams,
    tokens: &[Token],
    offset: usize,
) -> Result<Option<([u8; 32], BitString)>, OracleError> {
    if offset + params.window() > tokens.len() {
        return Ok(None);
    }
    scan(params, &BlockOracles::new(params.ell), tokens, offset, 0, |_| true)
}

/// Re-derive the bits at `offset`. Every `stride` bits the prefix is offered
/// to `plausible`, and a false answer abandons the window.
fn scan(
    params: &WatermarkParams,
    oracles: &BlockOracles,
    tokens: &[Token],
    offset: usize,
    stride: usize,
    plausible: impl Fn(&BitString) -> bool,
) -> Result<Option<([u8; 32], BitString)>, OracleError> {
    let ell = params.ell;
    let anchor = &tokens[offset..offset + ell];
    let digest = oracles.h1_message(anchor)?;
    let mask = if params.backend.masked() {
        Some(oracles.h2_mask(anchor, params.len_sig)?)
    } else {
        None
    };
    let mut chain = oracles.h3_chain();
    let mut bits = BitString::new();
    for j in 0..params.len_sig {
        let start = offset + ell * (j + 1);
        let x = &tokens[start..start + ell];
        let b = chain.bit_for(x);
        chain.push(x, b);
        bits.push(b ^ mask.as_ref().is_some_and(|m| m.get(j)));
        if stride > 0 && bits.len().is_multiple_of(stride) && !plausible(&bits) {
            return Ok(None);
        }
    }
    Ok(Some((digest, bits)))
}

/// First offset whose window verifies, scanning `0..=|tokens| - W`.
pub fn detect<D: Detector + ?Sized>(
    params: &WatermarkParams,
    detector: &D,
    tokens: &[Token],
) -> Result<DetectResult, WatermarkError> {
    let kind = detector.kind();
    params.check_backend(kind, detector.sig_bits())?;
    if let Some(&token) = tokens.iter().find(|&&t| t >= params.vocab) {
        return Err(OracleError::TokenOutOfRange {
            token,
            vocab: params.vocab,
        }
        .into());
    }
    let oracles = BlockOracles::new(params.ell);
    let w = params.window();
    let stride = detector.prefix_stride();
    if tokens.len() >= w {
        for offset in 0..=tokens.len() - w {
            let found = scan(params, &oracles, tokens, offset, stride, |p| {
                detector.prefix_plausible(p)
            })?;
            if let Some((digest, bits)) = found {
                if detector.verify(&digest, &tokens[offset..offset + params.ell], &bits) {
                    return Ok(DetectResult {
                        detected: true,
                        offset: Some(offset),
                        backend: kind,
                    });
                }
            }
        }
    }
    Ok(DetectResult {
        detected: false,
        offset: None,
        backend: kind,
    })
}
