use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{LanguageModel, ModelError};
use crate::oracles::Token;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpConfig {
    pub endpoint: String,
    pub vocab: u32,
    pub timeout: Duration,
    /// Extra attempts after a transport failure.
    pub retries: u32,
}

impl HttpConfig {
    pub fn new(endpoint: impl Into<String>, vocab: u32) -> Self {
        HttpConfig {
            endpoint: endpoint.into(),
            vocab,
            timeout: Duration::from_secs(30),
            retries: 2,
        }
    }
}

#[derive(Serialize)]
struct Request<'a> {
    prompt: &'a [Token],
    context: &'a [Token],
    num_tokens: usize,
}

#[derive(Deserialize)]
struct Response {
    tokens: Vec<Token>,
}

/// Completion service speaking
/// `POST {"prompt":[..],"context":[..],"num_tokens":n}` -> `{"tokens":[..]}`.
pub struct HttpModel {
    config: HttpConfig,
    agent: ureq::Agent,
}

impl HttpModel {
    pub fn new(config: HttpConfig) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        HttpModel { config, agent }
    }

    fn post(&self, body: &Request<'_>) -> Result<Response, ModelError> {
        let mut last = None;
        for _ in 0..=self.config.retries {
            match self.agent.post(&self.config.endpoint).send_json(body) {
                Ok(resp) => {
                    return resp
                        .into_json::<Response>()
                        .map_err(|e| ModelError::BadResponse(e.to_string()));
                }
                Err(ureq::Error::Status(code, _)) => {
                    return Err(ModelError::BadResponse(format!("HTTP status {code}")));
                }
                Err(e) => last = Some(e),
            }
        }
        Err(ModelError::Transport(last.map(|e| e.to_string()).unwrap_or_default()))
    }
}

impl LanguageModel for HttpModel {
    fn vocab_size(&self) -> u32 {
        self.config.vocab
    }

    fn gen_block(&mut self, prompt: &[Token], context: &[Token], len: usize) -> Result<Vec<Token>, ModelError> {
        let resp = self.post(&Request {
            prompt,
            context,
            num_tokens: len,
        })?;
        if resp.tokens.len() != len {
            return Err(ModelError::BadResponse(format!(
                "asked for {len} tokens, got {}",
                resp.tokens.len()
            )));
        }
        if let Some(&token) = resp.tokens.iter().find(|&&t| t >= self.config.vocab) {
            return Err(ModelError::TokenOutOfRange {
                token,
                vocab: self.config.vocab,
            });
        }
        Ok(resp.tokens)
    }
}
