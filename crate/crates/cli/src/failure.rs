use std::fmt;
use std::path::Path;

use mddw::model::ModelError;
use mddw::watermark::WatermarkError;

/// An error plus the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const USAGE: u8 = 2;
pub const IO: u8 = 3;

pub type Outcome<T> = Result<T, Failure>;

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure {
            code: IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<WatermarkError> for Failure {
    fn from(e: WatermarkError) -> Self {
        match e {
            WatermarkError::Model(ModelError::Transport(_) | ModelError::BadResponse(_)) => Failure {
                code: IO,
                message: e.to_string(),
            },
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        WatermarkError::Model(e).into()
    }
}
