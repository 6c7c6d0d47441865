use std::path::PathBuf;
use std::time::Instant;

use mddw::algebra::{Group, GroupId};
use mddw::base_sigs::{SchnorrKeyPair, SchnorrSig, DEFAULT_BLS_BITS};
use mddw::cmdvs::{CmdvsClaim, CmdvsPublicKey, CmdvsSignature, CmdvsSignerKey};
use mddw::dvs::DEFAULT_DVS_BITS;
use mddw::games::{run_suite, GameReport, Suite};
use mddw::mdvs::{MdvsKeyPair, MdvsSignature, VerifierSet};
use mddw::model::LanguageModel;
use mddw::oracles::{PrfKey, Token};
use mddw::watermark::{
    claim_text, clmver_text, detect, forge_ds, watmar, BackendKind, CmdvsDetector, CmdvsSigner, DdwDetector, DdwForger,
    DdwSigner, Detector, MdvsDetector, MdvsSigner, PdwDetector, PdwSigner, Signer, SlotClaim, TextClaimProof,
    WatermarkParams,
};
use mddw::Prod128;
use rand::RngCore;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::failure::{Failure, Outcome};
use crate::files::{read_json, ClaimEntry, ClaimFile, KeyFile, Role, TextFile, TextParams};
use crate::model_spec::ModelSpec;

/// Runs `$f::<G>(args)` for the group named by `$id`.
macro_rules! with_group {
    ($id:expr, $f:ident($($arg:expr),* $(,)?)) => {
        match $id {
            GroupId::Toy23 => $f::<mddw::Toy23>($($arg),*),
            GroupId::Test16 => $f::<mddw::Test16>($($arg),*),
            GroupId::Prod128 => $f::<mddw::Prod128>($($arg),*),
        }
    };
}

fn hex_scalar<G: Group>(s: &G::Scalar) -> String {
    hex::encode(G::encode_scalar(s))
}

fn hex_elem<G: Group>(e: &G::Elem) -> String {
    hex::encode(G::encode_elem(e))
}

fn needs_pairing(backend: BackendKind, group: GroupId) -> Outcome<()> {
    if matches!(backend, BackendKind::Ddw | BackendKind::Pdw) && group != GroupId::Prod128 {
        return Err(Failure::usage(format!(
            "backend {backend} needs a pairing group (prod128), got {group}"
        )));
    }
    Ok(())
}

pub fn keygen(scheme: BackendKind, role: Role, group: GroupId, rng: &mut ChaCha20Rng) -> Outcome<KeyFile> {
    needs_pairing(scheme, group)?;
    if scheme == BackendKind::Pdw && role == Role::Verifier {
        return Err(Failure::usage(
            "pdw has no verifier keys; detection uses the signer's public key",
        ));
    }
    Ok(with_group!(group, keygen_in(scheme, role, group, rng)))
}

fn keygen_in<G: Group>(scheme: BackendKind, role: Role, group: GroupId, rng: &mut ChaCha20Rng) -> KeyFile {
    let mut file = KeyFile {
        scheme,
        group,
        role,
        sk: None,
        pk: String::new(),
        prf_key: None,
        sig_sk: None,
        sig_pk: None,
    };
    if scheme == BackendKind::Cmdvs && role == Role::Signer {
        let key = CmdvsSignerKey::<G>::generate(rng);
        file.sk = Some(hex_scalar::<G>(&key.mdvs.sk));
        file.pk = hex_elem::<G>(&key.mdvs.pk);
        file.prf_key = Some(hex::encode(key.prf_key.0));
        file.sig_sk = Some(hex_scalar::<G>(&key.sig.sk));
        file.sig_pk = Some(hex_elem::<G>(&key.sig.pk));
    } else {
        let key = MdvsKeyPair::<G>::generate(rng);
        file.sk = Some(hex_scalar::<G>(&key.sk));
        file.pk = hex_elem::<G>(&key.pk);
    }
    file
}

/// Key material named on the command line, already read from disk.
pub struct Keys {
    /// The caller's own key: signer for watermark/claim, detector for detect.
    pub key: Option<KeyFile>,
    /// The signer's (public) key when the caller is not the signer.
    pub signer: Option<KeyFile>,
    /// Designated detectors.
    pub verifiers: Vec<KeyFile>,
}

impl Keys {
    pub fn read(key: Option<PathBuf>, signer: Option<PathBuf>, verifiers: &[PathBuf]) -> Outcome<Keys> {
        Ok(Keys {
            key: key.map(|p| read_json(&p)).transpose()?,
            signer: signer.map(|p| read_json(&p)).transpose()?,
            verifiers: verifiers.iter().map(|p| read_json(p)).collect::<Outcome<_>>()?,
        })
    }

    fn key(&self) -> Outcome<&KeyFile> {
        self.key.as_ref().ok_or_else(|| Failure::usage("--key is required"))
    }

    fn signer(&self) -> Outcome<&KeyFile> {
        self.signer
            .as_ref()
            .ok_or_else(|| Failure::usage("--signer is required"))
    }

    fn set<G: Group>(&self, group: GroupId, backend: BackendKind) -> Outcome<VerifierSet<G>> {
        if self.verifiers.is_empty() {
            return Err(Failure::usage("at least one --verifier is required"));
        }
        let pks = self
            .verifiers
            .iter()
            .map(|v| {
                v.expect(group, Role::Verifier)?;
                check_scheme(v, backend)?;
                v.pk::<G>()
            })
            .collect::<Outcome<Vec<_>>>()?;
        VerifierSet::new(&pks).map_err(|e| Failure::usage(e.to_string()))
    }

    fn single_verifier(&self, group: GroupId) -> Outcome<&KeyFile> {
        match self.verifiers.as_slice() {
            [v] => {
                v.expect(group, Role::Verifier)?;
                check_scheme(v, BackendKind::Ddw)?;
                Ok(v)
            }
            _ => Err(Failure::usage("ddw takes exactly one --verifier")),
        }
    }
}

fn check_scheme(key: &KeyFile, backend: BackendKind) -> Outcome<()> {
    // CMDVS detectors hold plain MDVS keys
    let compatible = key.scheme == backend
        || (key.role == Role::Verifier
            && matches!(key.scheme, BackendKind::Mdvs | BackendKind::Cmdvs)
            && matches!(backend, BackendKind::Mdvs | BackendKind::Cmdvs));
    if !compatible {
        return Err(Failure::usage(format!(
            "key is for scheme {}, expected {backend}",
            key.scheme
        )));
    }
    Ok(())
}

fn cmdvs_secret<G: Group>(key: &KeyFile) -> Outcome<CmdvsSignerKey<G>> {
    let sig = SchnorrKeyPair::<G>::from_secret(key.sig_sk::<G>()?);
    if sig.pk != key.sig_pk::<G>()? {
        return Err(Failure::usage("sig_sk does not match sig_pk"));
    }
    Ok(CmdvsSignerKey {
        prf_key: PrfKey(key.prf_key()?),
        sig,
        mdvs: MdvsKeyPair::from_secret(key.sk::<G>()?),
    })
}

fn cmdvs_public<G: Group>(key: &KeyFile) -> Outcome<CmdvsPublicKey<G>> {
    Ok(CmdvsPublicKey {
        spk_sig: key.sig_pk::<G>()?,
        spk_mdvs: key.pk::<G>()?,
    })
}

/// Generation settings shared by watermark, forge-ds and bench.
pub struct GenSettings {
    pub n: usize,
    pub ell: usize,
    pub model: ModelSpec,
    pub vocab: Option<u32>,
    pub prompt: Vec<Token>,
    pub tag_bits: Option<usize>,
    pub max_attempts: Option<u32>,
}

impl GenSettings {
    fn model(&self, rng: &mut ChaCha20Rng) -> Outcome<(Box<dyn LanguageModel>, u32)> {
        let model = self.model.build(self.ell, self.vocab, rng.next_u64())?;
        let vocab = model.vocab_size();
        if let Some(&t) = self.prompt.iter().find(|&&t| t >= vocab) {
            return Err(Failure::usage(format!(
                "prompt token {t} outside vocabulary of size {vocab}"
            )));
        }
        Ok((model, vocab))
    }

    fn params(&self, backend: BackendKind, vocab: u32, len_sig: usize) -> Outcome<WatermarkParams> {
        let mut p = WatermarkParams::new(self.n, self.ell, vocab, backend, len_sig);
        if let Some(a) = self.max_attempts {
            p.max_attempts = a;
        }
        p.validate().map_err(|e| Failure::usage(e.to_string()))?;
        if p.watermark_count() == 0 {
            eprintln!(
                "warning: n = {} leaves no room for a watermark of {} tokens",
                p.n,
                p.window()
            );
        }
        Ok(p)
    }

    fn tag_bits(&self, backend: BackendKind) -> usize {
        self.tag_bits.unwrap_or(match backend {
            BackendKind::Pdw => DEFAULT_BLS_BITS,
            _ => DEFAULT_DVS_BITS,
        })
    }
}

fn text_file(params: &WatermarkParams, group: GroupId, tokens: Vec<Token>) -> TextFile {
    TextFile {
        vocab: params.vocab,
        params: TextParams {
            n: params.n,
            ell: params.ell,
            len_sig: params.len_sig,
            backend: params.backend,
            group,
        },
        tokens,
    }
}

fn generate(
    settings: &GenSettings,
    backend: BackendKind,
    group: GroupId,
    signer: &dyn Signer,
    rng: &mut ChaCha20Rng,
) -> Outcome<TextFile> {
    let (mut model, vocab) = settings.model(rng)?;
    let params = settings.params(backend, vocab, signer.sig_bits())?;
    let tokens = watmar(&params, signer, &mut model, &settings.prompt, rng)?;
    Ok(text_file(&params, group, tokens))
}

pub fn watermark(keys: &Keys, settings: &GenSettings, rng: &mut ChaCha20Rng) -> Outcome<TextFile> {
    let key = keys.key()?;
    if key.role != Role::Signer {
        return Err(Failure::usage("watermark needs a signer --key"));
    }
    let (backend, group) = (key.scheme, key.group);
    needs_pairing(backend, group)?;
    match backend {
        BackendKind::Mdvs | BackendKind::Cmdvs => {
            with_group!(group, watermark_mdvs(keys, settings, backend, group, rng))
        }
        BackendKind::Ddw => {
            let v = keys.single_verifier(group)?;
            let signer =
                DdwSigner::<Prod128>::new(key.sk::<Prod128>()?, v.pk::<Prod128>()?, settings.tag_bits(backend));
            generate(settings, backend, group, &signer, rng)
        }
        BackendKind::Pdw => {
            let signer = PdwSigner::<Prod128>::new(key.sk::<Prod128>()?, settings.tag_bits(backend));
            generate(settings, backend, group, &signer, rng)
        }
    }
}

fn watermark_mdvs<G: Group>(
    keys: &Keys,
    settings: &GenSettings,
    backend: BackendKind,
    group: GroupId,
    rng: &mut ChaCha20Rng,
) -> Outcome<TextFile> {
    let key = keys.key()?;
    let set = keys.set::<G>(group, backend)?;
    if backend == BackendKind::Cmdvs {
        let signer = CmdvsSigner::new(cmdvs_secret::<G>(key)?, set);
        generate(settings, backend, group, &signer, rng)
    } else {
        let signer = MdvsSigner::new(MdvsKeyPair::from_secret(key.sk::<G>()?), set);
        generate(settings, backend, group, &signer, rng)
    }
}

pub fn forge(keys: &Keys, settings: &GenSettings, rng: &mut ChaCha20Rng) -> Outcome<TextFile> {
    let signer = keys.signer()?;
    let (backend, group) = (signer.scheme, signer.group);
    signer.expect(group, Role::Signer)?;
    needs_pairing(backend, group)?;
    match backend {
        BackendKind::Mdvs | BackendKind::Cmdvs => with_group!(group, forge_mdvs(keys, settings, backend, group, rng)),
        BackendKind::Ddw => {
            let v = keys.single_verifier(group)?;
            let forger =
                DdwForger::<Prod128>::new(signer.pk::<Prod128>()?, v.sk::<Prod128>()?, settings.tag_bits(backend));
            generate(settings, backend, group, &forger, rng)
        }
        BackendKind::Pdw => Err(Failure::usage(
            "pdw texts cannot be forged by detectors: there are none",
        )),
    }
}

fn forge_mdvs<G: Group>(
    keys: &Keys,
    settings: &GenSettings,
    backend: BackendKind,
    group: GroupId,
    rng: &mut ChaCha20Rng,
) -> Outcome<TextFile> {
    let spk = keys.signer()?.pk::<G>()?;
    let set = keys.set::<G>(group, backend)?;
    let vsks = keys
        .verifiers
        .iter()
        .map(|v| v.sk::<G>())
        .collect::<Outcome<Vec<_>>>()?;
    let len_sig = match backend {
        BackendKind::Cmdvs => CmdvsSignature::<G>::BITS,
        _ => MdvsSignature::<G>::BITS,
    };
    let (mut model, vocab) = settings.model(rng)?;
    let params = settings.params(backend, vocab, len_sig)?;
    let tokens = forge_ds(&params, &spk, &vsks, &set, &mut model, &settings.prompt, rng)?;
    Ok(text_file(&params, group, tokens))
}

#[derive(Debug, Serialize)]
pub struct DetectOutput {
    pub detected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
}

pub fn detect_text(keys: &Keys, text: &TextFile) -> Outcome<DetectOutput> {
    let (backend, group) = (text.params.backend, text.params.group);
    needs_pairing(backend, group)?;
    let detector: Box<dyn Detector> = match backend {
        BackendKind::Mdvs | BackendKind::Cmdvs => with_group!(group, mdvs_detector(keys, backend, group))?,
        BackendKind::Ddw => {
            let key = keys.key()?;
            key.expect(group, Role::Verifier)?;
            check_scheme(key, backend)?;
            let signer = keys.signer()?;
            check_scheme(signer, backend)?;
            Box::new(DdwDetector::<Prod128>::new(
                signer.pk::<Prod128>()?,
                key.sk::<Prod128>()?,
                text.params.len_sig,
            ))
        }
        BackendKind::Pdw => {
            let signer = keys.signer()?;
            check_scheme(signer, backend)?;
            Box::new(PdwDetector::<Prod128>::new(
                signer.pk::<Prod128>()?,
                text.params.len_sig,
            ))
        }
    };
    let r = detect(&text.watermark_params(), detector.as_ref(), &text.tokens)?;
    Ok(DetectOutput {
        detected: r.detected,
        offset: r.offset,
    })
}

fn mdvs_detector<G: Group>(keys: &Keys, backend: BackendKind, group: GroupId) -> Outcome<Box<dyn Detector>> {
    let key = keys.key()?;
    key.expect(group, Role::Verifier)?;
    check_scheme(key, backend)?;
    let signer = keys.signer()?;
    signer.expect(group, Role::Signer)?;
    check_scheme(signer, backend)?;
    let set = keys.set::<G>(group, backend)?;
    let vsk = key.sk::<G>()?;
    let not_designated = |e| Failure::usage(format!("{e}"));
    Ok(if backend == BackendKind::Cmdvs {
        Box::new(CmdvsDetector::new(&cmdvs_public::<G>(signer)?, &vsk, set).map_err(not_designated)?)
    } else {
        Box::new(MdvsDetector::new(signer.pk::<G>()?, &vsk, set).map_err(not_designated)?)
    })
}

fn require_cmdvs(text: &TextFile) -> Outcome<()> {
    if text.params.backend != BackendKind::Cmdvs {
        return Err(Failure::usage(format!(
            "claims need a cmdvs text, got {}",
            text.params.backend
        )));
    }
    Ok(())
}

pub fn claim(keys: &Keys, text: &TextFile) -> Outcome<ClaimFile> {
    require_cmdvs(text)?;
    with_group!(text.params.group, claim_in(keys, text))
}

fn claim_in<G: Group>(keys: &Keys, text: &TextFile) -> Outcome<ClaimFile> {
    let group = text.params.group;
    let key = keys.key()?;
    key.expect(group, Role::Signer)?;
    check_scheme(key, BackendKind::Cmdvs)?;
    let sk = cmdvs_secret::<G>(key)?;
    let set = keys.set::<G>(group, BackendKind::Cmdvs)?;
    let proof = claim_text(&text.watermark_params(), &sk, &set, &text.tokens)?;
    Ok(ClaimFile {
        proofs: proof
            .proofs
            .iter()
            .map(|p| ClaimEntry {
                offset: p.offset,
                r_commit: hex::encode(p.claim.r_commit),
                sigma_sig: hex::encode(p.claim.sigma_sig_bytes()),
            })
            .collect(),
    })
}

pub fn clmver(keys: &Keys, text: &TextFile, claim: &ClaimFile) -> Outcome<bool> {
    require_cmdvs(text)?;
    with_group!(text.params.group, clmver_in(keys, text, claim))
}

fn clmver_in<G: Group>(keys: &Keys, text: &TextFile, claim: &ClaimFile) -> Outcome<bool> {
    let group = text.params.group;
    let signer = keys.signer()?;
    signer.expect(group, Role::Signer)?;
    check_scheme(signer, BackendKind::Cmdvs)?;
    let pk = cmdvs_public::<G>(signer)?;
    let set = keys.set::<G>(group, BackendKind::Cmdvs)?;
    let proofs = claim
        .proofs
        .iter()
        .map(|e| {
            let r = hex::decode(&e.r_commit).map_err(|err| Failure::usage(format!("r_commit: {err}")))?;
            let s = hex::decode(&e.sigma_sig).map_err(|err| Failure::usage(format!("sigma_sig: {err}")))?;
            if s.len() != SchnorrSig::<G>::BYTES {
                return Err(Failure::usage(format!(
                    "sigma_sig must be {} bytes",
                    SchnorrSig::<G>::BYTES
                )));
            }
            let claim = CmdvsClaim::from_parts(&r, &s).map_err(|err| Failure::usage(err.to_string()))?;
            Ok(SlotClaim {
                offset: e.offset,
                claim,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    Ok(clmver_text(
        &text.watermark_params(),
        &pk,
        &set,
        &text.tokens,
        &TextClaimProof { proofs },
    )?)
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub backend: BackendKind,
    pub group: GroupId,
    pub n: usize,
    pub ell: usize,
    pub len_sig: usize,
    pub detectors: usize,
    pub runs: usize,
    pub generation_ms: Vec<f64>,
    pub detection_ms: Vec<f64>,
    pub generation_mean_ms: f64,
    pub detection_mean_ms: f64,
    pub detected: usize,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Fresh keys, then `runs` rounds of generation and detection.
pub fn bench(
    backend: BackendKind,
    group: GroupId,
    detectors: usize,
    runs: usize,
    settings: &GenSettings,
    rng: &mut ChaCha20Rng,
) -> Outcome<BenchReport> {
    needs_pairing(backend, group)?;
    if detectors == 0 {
        return Err(Failure::usage("need at least one detector"));
    }
    let signer = keygen(backend, Role::Signer, group, rng)?;
    let verifiers = match backend {
        BackendKind::Pdw => Vec::new(),
        BackendKind::Ddw => vec![keygen(backend, Role::Verifier, group, rng)?],
        _ => (0..detectors)
            .map(|_| keygen(backend, Role::Verifier, group, rng))
            .collect::<Outcome<_>>()?,
    };
    let keys = Keys {
        key: Some(signer.clone()),
        signer: None,
        verifiers,
    };
    let detect_keys = Keys {
        key: keys.verifiers.first().cloned(),
        signer: Some(signer.public()),
        verifiers: keys.verifiers.iter().map(KeyFile::public).collect(),
    };
    let (mut generation_ms, mut detection_ms, mut detected) = (Vec::new(), Vec::new(), 0);
    let mut len_sig = 0;
    for _ in 0..runs {
        let start = Instant::now();
        let text = watermark(&keys, settings, rng)?;
        generation_ms.push(millis(start));
        len_sig = text.params.len_sig;
        let start = Instant::now();
        detected += usize::from(detect_text(&detect_keys, &text)?.detected);
        detection_ms.push(millis(start));
    }
    Ok(BenchReport {
        backend,
        group,
        n: settings.n,
        ell: settings.ell,
        len_sig,
        detectors: keys.verifiers.len(),
        runs,
        generation_mean_ms: mean(&generation_ms),
        detection_mean_ms: mean(&detection_ms),
        generation_ms,
        detection_ms,
        detected,
    })
}

pub fn games(suite: Option<Suite>, trials: Option<usize>, seed: u64) -> Vec<GameReport> {
    let suites = suite.map_or(Suite::ALL.to_vec(), |s| vec![s]);
    suites
        .into_iter()
        .map(|s| run_suite(s, trials.unwrap_or_else(|| default_trials(s)), seed))
        .collect()
}

/// Trial counts at acceptance scale.
pub fn default_trials(suite: Suite) -> usize {
    match suite {
        Suite::Completeness => 200,
        Suite::Consistency | Suite::Soundness => 1000,
        Suite::Attempts => 10_000,
        Suite::Robustness | Suite::Otr | Suite::Distortion | Suite::Claim => 100,
    }
}
