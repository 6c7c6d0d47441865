//! Token-generating models: the interface the watermark engine samples from,
//! a seeded mock with a controllable per-token candidate set, and an HTTP
//! adapter for an external completion service.

mod http;
mod mock;

use thiserror::Error;

use crate::oracles::Token;

pub use http::{HttpConfig, HttpModel};
pub use mock::{MockModel, ModelConfig};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("bad response: {0}")]
    BadResponse(String),
    #[error("token {token} outside vocabulary of size {vocab}")]
    TokenOutOfRange { token: Token, vocab: u32 },
    #[error("invalid model configuration: {0}")]
    Config(String),
}

/// An auto-regressive model seen through block generation.
///
/// Repeated calls with the same `(prompt, context)` must return independent
/// samples; rejection sampling relies on it.
pub trait LanguageModel {
    fn vocab_size(&self) -> u32;

    /// `len` fresh tokens continuing `prompt || context`.
    fn gen_block(&mut self, prompt: &[Token], context: &[Token], len: usize) -> Result<Vec<Token>, ModelError>;
}

impl<M: LanguageModel + ?Sized> LanguageModel for &mut M {
    fn vocab_size(&self) -> u32 {
        (**self).vocab_size()
    }

    fn gen_block(&mut self, prompt: &[Token], context: &[Token], len: usize) -> Result<Vec<Token>, ModelError> {
        (**self).gen_block(prompt, context, len)
    }
}

impl<M: LanguageModel + ?Sized> LanguageModel for Box<M> {
    fn vocab_size(&self) -> u32 {
        (**self).vocab_size()
    }

    fn gen_block(&mut self, prompt: &[Token], context: &[Token], len: usize) -> Result<Vec<Token>, ModelError> {
        (**self).gen_block(prompt, context, len)
    }
}
