//! Desk-scale security experiments run against the public API.
//!
//! Each suite draws fresh honest keys, plays a scripted adversary, and counts
//! failures of the property under test. Everything is seeded, so a report is
//! reproducible byte for byte. What one trial means:
//!
//! | suite          | one trial                                                                               |
//! |----------------|-----------------------------------------------------------------------------------------|
//! | `completeness` | watermark a text, then detect with each of 3 detectors                                  |
//! | `consistency`  | one candidate (random, mutated or cropped) of at most 160 tokens, judged by 3 detectors |
//! | `soundness`    | one random text and one splice of issued texts, prod128 keys                            |
//! | `robustness`   | crop a multi-watermark text to `2W` tokens and detect                                   |
//! | `otr`          | one forged text; plus 50 signature pairs and 1000 tokens per corpus                     |
//! | `distortion`   | 1000 watermarked and 1000 plain tokens from a uniform model                             |
//! | `claim`        | claim and verify own text, try a foreign text, reject 10 bad proofs                     |
//! | `attempts`     | one carrier block                                                                       |
//!
//! All suites except `soundness` use the `test16` group with `l = 2`, a mock
//! model with `V = 64`, and three designated detectors. On `test16` a random
//! window passes MDVS verification with probability about `1/q = 2^-16`, which
//! is why soundness runs on `prod128`.

use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Group;
use crate::base_sigs::{schnorr_sign, SchnorrSig};
use crate::cmdvs::{CmdvsClaim, CmdvsSignerKey};
use crate::mdvs::{mdvs_fge_ds, mdvs_sign, MdvsKeyPair, MdvsSignature, VerifierSet};
use crate::model::{LanguageModel, MockModel, ModelConfig};
use crate::oracles::Token;
use crate::stats::{histogram, homogeneity_p, uniformity_p};
use crate::watermark::{
    claim_text, clmver_text, detect, forge_ds, nolap_k, watmar, watmar_traced, BackendKind, CmdvsDetector, CmdvsSigner,
    MdvsDetector, MdvsSigner, SlotClaim, TextClaimProof, WatermarkParams,
};
use crate::{Prod128, Test16};

const VOCAB: u32 = 64;
const ELL: usize = 2;
const DETECTORS: usize = 3;
const P_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Completeness,
    Consistency,
    Soundness,
    Robustness,
    Otr,
    Distortion,
    Claim,
    Attempts,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Completeness,
        Suite::Consistency,
        Suite::Soundness,
        Suite::Robustness,
        Suite::Otr,
        Suite::Distortion,
        Suite::Claim,
        Suite::Attempts,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Completeness => "completeness",
            Suite::Consistency => "consistency",
            Suite::Soundness => "soundness",
            Suite::Robustness => "robustness",
            Suite::Otr => "otr",
            Suite::Distortion => "distortion",
            Suite::Claim => "claim",
            Suite::Attempts => "attempts",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub suite: Suite,
    pub trials: usize,
    pub failures: usize,
    pub statistics: BTreeMap<String, f64>,
    pub seed: u64,
}

impl GameReport {
    fn new(suite: Suite, trials: usize, seed: u64) -> Self {
        GameReport {
            suite,
            trials,
            failures: 0,
            statistics: BTreeMap::new(),
            seed,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn stat(&mut self, name: &str, value: f64) {
        self.statistics.insert(name.to_string(), value);
    }

    fn fail_if(&mut self, bad: bool) {
        self.failures += usize::from(bad);
    }

    /// Record a p-value; below the threshold counts as a failure.
    fn p_value(&mut self, name: &str, p: f64) {
        self.stat(name, p);
        self.fail_if(p <= P_THRESHOLD);
    }
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> GameReport {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut report = GameReport::new(suite, trials, seed);
    match suite {
        Suite::Completeness => completeness(&mut report, &mut rng),
        Suite::Consistency => consistency(&mut report, &mut rng),
        Suite::Soundness => soundness(&mut report, &mut rng),
        Suite::Robustness => robustness(&mut report, &mut rng),
        Suite::Otr => otr(&mut report, &mut rng),
        Suite::Distortion => distortion(&mut report, &mut rng),
        Suite::Claim => claim(&mut report, &mut rng),
        Suite::Attempts => attempts(&mut report, &mut rng),
    }
    report
}

/// Signer and three designated detectors on one group.
struct Keys<G: Group> {
    signer: MdvsKeyPair<G>,
    vsks: Vec<G::Scalar>,
    set: VerifierSet<G>,
}

impl<G: Group> Keys<G> {
    fn generate(rng: &mut ChaCha20Rng) -> Self {
        let signer = MdvsKeyPair::generate(rng);
        let vs: Vec<MdvsKeyPair<G>> = (0..DETECTORS).map(|_| MdvsKeyPair::generate(rng)).collect();
        let set = VerifierSet::new(&vs.iter().map(|v| v.pk).collect::<Vec<_>>()).expect("nonempty");
        Keys {
            signer,
            vsks: vs.iter().map(|v| v.sk).collect(),
            set,
        }
    }

    fn signer(&self) -> MdvsSigner<G> {
        MdvsSigner::new(self.signer, self.set.clone())
    }

    fn detectors(&self) -> Vec<MdvsDetector<G>> {
        self.vsks
            .iter()
            .map(|vsk| MdvsDetector::new(self.signer.pk, vsk, self.set.clone()).expect("designated"))
            .collect()
    }
}

fn mock(rng: &mut ChaCha20Rng, k_cand: u32) -> MockModel {
    let config = ModelConfig {
        vocab: VOCAB,
        k_cand,
        seed: rng.gen(),
        block_len: ELL,
    };
    MockModel::new(config, rng.gen()).expect("valid mock config")
}

fn mdvs_params<G: Group>(n: usize) -> WatermarkParams {
    WatermarkParams::new(n, ELL, VOCAB, BackendKind::Mdvs, MdvsSignature::<G>::BITS)
}

fn prompt(rng: &mut ChaCha20Rng) -> Vec<Token> {
    (0..4).map(|_| rng.gen_range(0..VOCAB)).collect()
}

fn random_text(rng: &mut ChaCha20Rng, len: usize) -> Vec<Token> {
    (0..len).map(|_| rng.gen_range(0..VOCAB)).collect()
}

fn detected<G: Group>(params: &WatermarkParams, d: &MdvsDetector<G>, text: &[Token]) -> bool {
    detect(params, d, text).is_ok_and(|r| r.detected)
}

fn completeness(report: &mut GameReport, rng: &mut ChaCha20Rng) {
    let params = mdvs_params::<Test16>(160);
    for _ in 0..report.trials {
        let keys = Keys::<Test16>::generate(rng);
        let p = prompt(rng);
        let text = watmar(&params, &keys.signer(), &mut mock(rng, 16), &p, rng);
        let ok = text.is_ok_and(|t| keys.detectors().iter().all(|d| detected(&params, d, &t)));
        report.fail_if(!ok);
    }
}

fn consistency(report: &mut GameReport, rng: &mut ChaCha20Rng) {
    let params = mdvs_params::<Test16>(160);
    let keys = Keys::<Test16>::generate(rng);
    let detectors = keys.detectors();
    let signer = keys.signer();
    let mut accepted = 0usize;
    for i in 0..report.trials {
        let candidate = match i % 3 {
            0 => random_text(rng, 160),
            1 => {
                let mut t = watmar(&params, &signer, &mut mock(rng, 16), &[], rng).expect("mock has entropy");
                for _ in 0..rng.gen_range(1..=3) {
                    let at = rng.gen_range(0..t.len());
                    t[at] = rng.gen_range(0..VOCAB);
                }
                t
            }
            _ => {
                let t = watmar(&params, &signer, &mut mock(rng, 16), &[], rng).expect("mock has entropy");
                let len = rng.gen_range(params.window()..=t.len());
                let start = rng.gen_range(0..=t.len() - len);
                t[start..start + len].to_vec()
            }
        };
        let votes: Vec<bool> = detectors.iter().map(|d| detected(&params, d, &candidate)).collect();
        report.fail_if(votes.iter().any(|v| *v != votes[0]));
        accepted += usize::from(votes[0]);
    }
    report.stat("accepted_fraction", accepted as f64 / report.trials.max(1) as f64);
}

/// A text built from pieces of the issued texts, none of which shares an
/// `ell`-window with them.
fn nolap_splice(rng: &mut ChaCha20Rng, issued: &[Vec<Token>], len: usize, ell: usize) -> Vec<Token> {
    let grams: HashSet<&[Token]> = issued.iter().flat_map(|t| t.windows(ell)).collect();
    let fresh = |out: &[Token], tok: Token| {
        out.len() + 1 < ell || {
            let mut w = out[out.len() + 1 - ell..].to_vec();
            w.push(tok);
            !grams.contains(w.as_slice())
        }
    };
    let mut out: Vec<Token> = Vec::with_capacity(len);
    while out.len() < len {
        let src = &issued[rng.gen_range(0..issued.len())];
        // a piece of ell - 1 tokens starting on a block boundary
        let at = ell * rng.gen_range(0..src.len() / ell);
        for &tok in src[at..].iter().take(ell.saturating_sub(1)) {
            if out.len() == len {
                break;
            }
            if fresh(&out, tok) {
                out.push(tok);
            }
        }
        if out.len() < len {
            let filler = loop {
                let t = rng.gen_range(0..VOCAB);
                if fresh(&out, t) {
                    break t;
                }
            };
            out.push(filler);
        }
    }
    out
}

fn soundness(report: &mut GameReport, rng: &mut ChaCha20Rng) {
    let n = MdvsSignature::<Prod128>::BITS * ELL + 3 * ELL + 6;
    let params = mdvs_params::<Prod128>(n);
    let keys = Keys::<Prod128>::generate(rng);
    let detector = &keys.detectors()[0];
    let issued: Vec<Vec<Token>> = (0..2)
        .map(|_| watmar(&params, &keys.signer(), &mut mock(rng, 16), &[], rng).expect("mock has entropy"))
        .collect();
    let mut hits = 0;
    let mut overlapping = 0;
    for _ in 0..report.trials {
        hits += usize::from(detected(&params, detector, &random_text(rng, n)));
        let splice = nolap_splice(rng, &issued, n, ELL);
        if nolap_k(ELL, &splice, &issued) {
            hits += usize::from(detected(&params, detector, &splice));
        } else {
            overlapping += 1;
        }
    }
    report.failures = hits + overlapping;
    report.stat("detections", hits as f64);
    report.stat("texts", 2.0 * report.trials as f64);
    report.stat("offsets_per_text", (n - params.window() + 1) as f64);
    report.stat(
        "issued_detected",
        issued.iter().filter(|t| detected(&params, detector, t)).count() as f64,
    );
}

fn robustness(report: &mut GameReport, rng: &mut ChaCha20Rng) {
    let params = mdvs_params::<Test16>(400);
    let w = params.window();
    let keys = Keys::<Test16>::generate(rng);
    let detectors = keys.detectors();
    let signer = keys.signer();
    for _ in 0..report.trials {
        let text = watmar(&params, &signer, &mut mock(rng, 16), &[], rng).expect("mock has entropy");
        let k = params.watermark_count();
        let last = ((k - 1) * w).min(text.len() - 2 * w);
        let start = rng.gen_range(0..=last);
        let crop = &text[start..start + 2 * w];
        let d = &detectors[rng.gen_range(0..detectors.len())];
        report.fail_if(!detected(&params, d, crop));
    }
    report.stat("watermarks_per_text", params.watermark_count() as f64);
}

fn token_histogram(texts: &[Vec<Token>]) -> Vec<u64> {
    let mut counts = vec![0u64; VOCAB as usize];
    for t in texts.iter().flatten() {
        counts[*t as usize] += 1;
    }
    counts
}

/// Generate texts of length `n` until `tokens` tokens are collected.
fn corpus<F: FnMut(&mut ChaCha20Rng) -> Vec<Token>>(
    rng: &mut ChaCha20Rng,
    tokens: usize,
    mut gen: F,
) -> Vec<Vec<Token>> {
    let mut out = Vec::new();
    let mut total = 0;
    while total < tokens {
        let mut t = gen(rng);
        t.truncate(tokens - total);
        total += t.len();
        out.push(t);
    }
    out
}

fn otr(report: &mut GameReport, rng: &mut ChaCha20Rng) {
    let params = mdvs_params::<Test16>(400);
    let keys = Keys::<Test16>::generate(rng);
    let detectors = keys.detectors();
    let mut accepted = 0;
    for _ in 0..report.trials {
        let text = forge_ds(
            &params,
            &keys.signer.pk,
            &keys.vsks,
            &keys.set,
            &mut mock(rng, 16),
            &[],
            rng,
        );
        let ok = text.is_ok_and(|t| detectors.iter().all(|d| detected(&params, d, &t)));
        accepted += usize::from(ok);
        report.fail_if(!ok);
    }
    report.stat("forged_accepted", accepted as f64);

    let samples = 50 * report.trials;
    let q = 65521;
    let mut signed: [Vec<u64>; 4] = Default::default();
    let mut forged: [Vec<u64>; 4] = Default::default();
    for i in 0..samples {
        let m = (i as u64).to_be_bytes();
        let s = mdvs_sign(&keys.signer, &keys.set, &m, rng);
        let f = mdvs_fge_ds::<Test16, _>(&keys.signer.pk, &keys.vsks, &m, rng).expect("complete secrets");
        for (j, (a, b)) in [(s.c1, f.c1), (s.c2, f.c2), (s.z1, f.z1), (s.z2, f.z2)]
            .into_iter()
            .enumerate()
        {
            signed[j].push(a.value());
            forged[j].push(b.value());
        }
    }
    for (j, name) in ["c1", "c2", "z1", "z2"].iter().enumerate() {
        report.p_value(
            &format!("sign_{name}_uniform_p"),
            uniformity_p(&histogram(signed[j].iter().copied(), q, 16)),
        );
        report.p_value(
            &format!("fgeds_{name}_uniform_p"),
            uniformity_p(&histogram(forged[j].iter().copied(), q, 16)),
        );
    }

    let tokens = 1000 * report.trials;
    let honest = corpus(rng, tokens, |r| {
        watmar(&params, &keys.signer(), &mut mock(r, 16), &[], r).expect("entropy")
    });
    let fakes = corpus(rng, tokens, |r| {
        forge_ds(
            &params,
            &keys.signer.pk,
            &keys.vsks,
            &keys.set,
            &mut mock(r, 16),
            &[],
            r,
        )
        .expect("entropy")
    });
    report.p_value(
        "token_homogeneity_p",
        homogeneity_p(&token_histogram(&honest), &token_histogram(&fakes)),
    );
}

fn distortion(report: &mut GameReport, rng: &mut ChaCha20Rng) {
    let params = mdvs_params::<Test16>(400);
    let keys = Keys::<Test16>::generate(rng);
    let tokens = 1000 * report.trials;
    let marked = corpus(rng, tokens, |r| {
        watmar(&params, &keys.signer(), &mut mock(r, VOCAB), &[], r).expect("entropy")
    });
    let plain = corpus(rng, tokens, |r| {
        let mut m = mock(r, VOCAB);
        let mut t = Vec::with_capacity(400);
        while t.len() < 400 {
            let b = m.gen_block(&[], &t, ELL).expect("mock never fails");
            t.extend(b);
        }
        t
    });
    let (hm, hp) = (token_histogram(&marked), token_histogram(&plain));
    report.p_value("homogeneity_p", homogeneity_p(&hm, &hp));
    report.stat("watermarked_uniform_p", uniformity_p(&hm));
    report.stat("plain_uniform_p", uniformity_p(&hp));
    report.stat("tokens_per_corpus", tokens as f64);
}

fn claim(report: &mut GameReport, rng: &mut ChaCha20Rng) {
    let params = WatermarkParams::new(
        700,
        ELL,
        VOCAB,
        BackendKind::Cmdvs,
        crate::cmdvs::CmdvsSignature::<Test16>::BITS,
    );
    let keys = Keys::<Test16>::generate(rng);
    let sk = CmdvsSignerKey::<Test16>::generate(rng);
    let pk = sk.public();
    let signer = CmdvsSigner::new(sk, keys.set.clone());
    let detector = CmdvsDetector::new(&pk, &keys.vsks[0], keys.set.clone()).expect("designated");
    let (mut roundtrips, mut foreign_claims, mut bad_accepts, mut bad_total) = (0, 0, 0, 0);
    let mut previous: Option<(Vec<Token>, TextClaimProof<Test16>)> = None;

    for _ in 0..report.trials {
        let text = watmar(&params, &signer, &mut mock(rng, 16), &[], rng).expect("entropy");
        let proof = claim_text(&params, &sk, &keys.set, &text).expect("cmdvs params");
        let ok = !proof.proofs.is_empty()
            && clmver_text(&params, &pk, &keys.set, &text, &proof).expect("cmdvs params")
            && detect(&params, &detector, &text).is_ok_and(|r| r.detected);
        roundtrips += usize::from(ok);
        report.fail_if(!ok);

        // another provider's text, claimed with our key
        let other = CmdvsSignerKey::<Test16>::generate(rng);
        let other_text = watmar(
            &params,
            &CmdvsSigner::new(other, keys.set.clone()),
            &mut mock(rng, 16),
            &[],
            rng,
        )
        .expect("entropy");
        let stolen = claim_text(&params, &sk, &keys.set, &other_text).expect("cmdvs params");
        foreign_claims += stolen.proofs.len();
        report.fail_if(!stolen.proofs.is_empty());

        // bad proofs: random openings, replays, and claims on verifier forgeries
        let forged = forge_ds(
            &params,
            &sk.mdvs.pk,
            &keys.vsks,
            &keys.set,
            &mut mock(rng, 16),
            &[],
            rng,
        )
        .expect("entropy");
        let adversary = CmdvsSignerKey::<Test16>::generate(rng);
        for j in 0..10 {
            let (target, proof) = match j % 5 {
                0 | 1 => (&text, random_proof(rng, &adversary, params.window())),
                2 => match &previous {
                    Some((_, old)) => (&text, old.clone()),
                    None => (&text, random_proof(rng, &adversary, 0)),
                },
                3 => (&forged, random_proof(rng, &adversary, 0)),
                _ => (&forged, proof.clone()),
            };
            // neither as an accusation against us nor as a claim for the adversary
            let accepted = clmver_text(&params, &pk, &keys.set, target, &proof).expect("cmdvs params")
                || clmver_text(&params, &adversary.public(), &keys.set, target, &proof).expect("cmdvs params");
            bad_total += 1;
            bad_accepts += usize::from(accepted);
            report.fail_if(accepted);
        }
        report.fail_if(
            !claim_text(&params, &sk, &keys.set, &forged)
                .expect("cmdvs params")
                .proofs
                .is_empty(),
        );
        previous = Some((text, proof));
    }
    report.stat("roundtrips", roundtrips as f64);
    report.stat("foreign_claims", foreign_claims as f64);
    report.stat("bad_proofs", bad_total as f64);
    report.stat("bad_proofs_accepted", bad_accepts as f64);
}

fn random_proof(
    rng: &mut ChaCha20Rng,
    adversary: &CmdvsSignerKey<Test16>,
    max_offset: usize,
) -> TextClaimProof<Test16> {
    let mut r_commit = [0u8; 32];
    rng.fill_bytes(&mut r_commit);
    let mut nonce = [0u8; 32];
    rng.fill_bytes(&mut nonce);
    let sigma_sig: SchnorrSig<Test16> = schnorr_sign(&adversary.sig, &r_commit, &nonce);
    TextClaimProof {
        proofs: vec![SlotClaim {
            offset: rng.gen_range(0..=max_offset),
            claim: CmdvsClaim { r_commit, sigma_sig },
        }],
    }
}

fn attempts(report: &mut GameReport, rng: &mut ChaCha20Rng) {
    let keys = Keys::<Test16>::generate(rng);
    let signer = keys.signer();
    let params = mdvs_params::<Test16>(4000);
    let mut counts: Vec<u32> = Vec::with_capacity(report.trials);
    while counts.len() < report.trials {
        let trace = watmar_traced(&params, &signer, &mut mock(rng, 16), &[], rng).expect("entropy");
        counts.extend(trace.attempts);
    }
    counts.truncate(report.trials);
    let mean = counts.iter().map(|&a| f64::from(a)).sum::<f64>() / counts.len().max(1) as f64;
    report.stat("mean_attempts", mean);
    report.stat("max_attempts", counts.iter().copied().max().unwrap_or(0) as f64);
    report.fail_if(!(1.9..=2.1).contains(&mean));
}
