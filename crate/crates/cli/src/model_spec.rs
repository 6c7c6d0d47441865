use std::str::FromStr;

use mddw::model::{HttpConfig, HttpModel, LanguageModel, MockModel, ModelConfig};

use crate::failure::{Failure, Outcome};

/// `mock:seed=..,V=..,k=..` (any subset, defaults 0/64/16) or `http:<url>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    Mock { seed: u64, vocab: u32, k_cand: u32 },
    Http { url: String },
}

impl FromStr for ModelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(url) = s.strip_prefix("http:") {
            if url.is_empty() {
                return Err("http model needs a URL".into());
            }
            return Ok(ModelSpec::Http { url: url.to_string() });
        }
        let rest = s
            .strip_prefix("mock")
            .ok_or_else(|| format!("model spec {s:?} must start with mock or http:"))?;
        let defaults = ModelConfig::default();
        let (mut seed, mut vocab, mut k_cand) = (defaults.seed, defaults.vocab, defaults.k_cand);
        let rest = match rest.strip_prefix(':') {
            Some(r) => r,
            None if rest.is_empty() => "",
            None => return Err(format!("model spec {s:?} must look like mock:seed=..,V=..,k=..")),
        };
        for pair in rest.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {pair:?}"))?;
            let bad = |e: std::num::ParseIntError| format!("{key}: {e}");
            match key {
                "seed" => seed = value.parse().map_err(bad)?,
                "V" => vocab = value.parse().map_err(bad)?,
                "k" => k_cand = value.parse().map_err(bad)?,
                other => return Err(format!("unknown mock parameter {other:?}")),
            }
        }
        Ok(ModelSpec::Mock { seed, vocab, k_cand })
    }
}

impl ModelSpec {
    /// Builds the model; `http_vocab` is required for HTTP models.
    pub fn build(&self, ell: usize, http_vocab: Option<u32>, sample_seed: u64) -> Outcome<Box<dyn LanguageModel>> {
        match self {
            ModelSpec::Mock { seed, vocab, k_cand } => {
                let config = ModelConfig {
                    vocab: *vocab,
                    k_cand: *k_cand,
                    seed: *seed,
                    block_len: ell,
                };
                Ok(Box::new(
                    MockModel::new(config, sample_seed).map_err(|e| Failure::usage(e.to_string()))?,
                ))
            }
            ModelSpec::Http { url } => {
                let vocab = http_vocab.ok_or_else(|| Failure::usage("--vocab is required with an http model"))?;
                Ok(Box::new(HttpModel::new(HttpConfig::new(url.clone(), vocab))))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mock_specs() {
        assert_eq!(
            "mock:seed=7,V=32,k=4".parse::<ModelSpec>().unwrap(),
            ModelSpec::Mock {
                seed: 7,
                vocab: 32,
                k_cand: 4
            }
        );
        assert_eq!(
            "mock".parse::<ModelSpec>().unwrap(),
            ModelSpec::Mock {
                seed: 0,
                vocab: 64,
                k_cand: 16
            }
        );
        assert_eq!(
            "mock:k=8".parse::<ModelSpec>().unwrap(),
            ModelSpec::Mock {
                seed: 0,
                vocab: 64,
                k_cand: 8
            }
        );
        for bad in ["mock:q=1", "mock:seed", "mock:V=x", "mocked", "gpt", "http:"] {
            assert!(bad.parse::<ModelSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn parses_http_specs() {
        assert_eq!(
            "http:http://localhost:8080/gen".parse::<ModelSpec>().unwrap(),
            ModelSpec::Http {
                url: "http://localhost:8080/gen".into()
            }
        );
    }

    #[test]
    fn http_needs_vocab() {
        let spec: ModelSpec = "http:http://127.0.0.1:1/".parse().unwrap();
        assert!(spec.build(2, None, 0).is_err());
        assert!(spec.build(2, Some(64), 0).is_ok());
    }
}
