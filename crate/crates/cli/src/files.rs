//! On-disk JSON formats: keys, watermarked texts and claim proofs.

use std::fs;
use std::path::Path;

use mddw::algebra::{Group, GroupId};
use mddw::oracles::Token;
use mddw::watermark::{BackendKind, WatermarkParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::failure::{Failure, Outcome};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Signer,
    Verifier,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Role::Signer => "signer",
            Role::Verifier => "verifier",
        })
    }
}

/// Key file. `sk` is absent in a public copy. CMDVS signer keys carry the
/// PRF key and the Schnorr pair next to the MDVS pair in `sk`/`pk`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub scheme: BackendKind,
    pub group: GroupId,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sk: Option<String>,
    pub pk: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prf_key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sig_sk: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sig_pk: Option<String>,
}

fn unhex(field: &str, value: &str) -> Outcome<Vec<u8>> {
    hex::decode(value).map_err(|e| Failure::usage(format!("{field}: {e}")))
}

impl KeyFile {
    pub fn public(&self) -> KeyFile {
        KeyFile {
            sk: None,
            prf_key: None,
            sig_sk: None,
            ..self.clone()
        }
    }

    pub fn expect(&self, group: GroupId, role: Role) -> Outcome<()> {
        if self.group != group {
            return Err(Failure::usage(format!(
                "key is for group {}, expected {group}",
                self.group
            )));
        }
        if self.role != role {
            return Err(Failure::usage(format!("key has role {}, expected {role}", self.role)));
        }
        Ok(())
    }

    pub fn pk<G: Group>(&self) -> Outcome<G::Elem> {
        G::decode_elem(&unhex("pk", &self.pk)?).map_err(|e| Failure::usage(format!("pk: {e}")))
    }

    pub fn sk<G: Group>(&self) -> Outcome<G::Scalar> {
        let hex = self
            .sk
            .as_deref()
            .ok_or_else(|| Failure::usage("key file has no secret key"))?;
        let sk = G::decode_scalar(&unhex("sk", hex)?).map_err(|e| Failure::usage(format!("sk: {e}")))?;
        if G::exp_g(&sk) != self.pk::<G>()? {
            return Err(Failure::usage("sk does not match pk"));
        }
        Ok(sk)
    }

    pub fn sig_pk<G: Group>(&self) -> Outcome<G::Elem> {
        let hex = self
            .sig_pk
            .as_deref()
            .ok_or_else(|| Failure::usage("key file has no sig_pk"))?;
        G::decode_elem(&unhex("sig_pk", hex)?).map_err(|e| Failure::usage(format!("sig_pk: {e}")))
    }

    pub fn sig_sk<G: Group>(&self) -> Outcome<G::Scalar> {
        let hex = self
            .sig_sk
            .as_deref()
            .ok_or_else(|| Failure::usage("key file has no sig_sk"))?;
        G::decode_scalar(&unhex("sig_sk", hex)?).map_err(|e| Failure::usage(format!("sig_sk: {e}")))
    }

    pub fn prf_key(&self) -> Outcome<[u8; 32]> {
        let hex = self
            .prf_key
            .as_deref()
            .ok_or_else(|| Failure::usage("key file has no prf_key"))?;
        unhex("prf_key", hex)?
            .try_into()
            .map_err(|_| Failure::usage("prf_key must be 32 bytes"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextParams {
    pub n: usize,
    pub ell: usize,
    pub len_sig: usize,
    pub backend: BackendKind,
    pub group: GroupId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextFile {
    pub vocab: u32,
    pub params: TextParams,
    pub tokens: Vec<Token>,
}

impl TextFile {
    pub fn watermark_params(&self) -> WatermarkParams {
        let p = &self.params;
        WatermarkParams::new(p.n, p.ell, self.vocab, p.backend, p.len_sig)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimEntry {
    pub offset: usize,
    pub r_commit: String,
    pub sigma_sig: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimFile {
    pub proofs: Vec<ClaimEntry>,
}
