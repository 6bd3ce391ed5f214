use levy_liouville::{DomainError, GeneratorError, StructureError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

impl CliError {
    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema { pointer: pointer.into(), message: message.into() }
    }

    pub fn body(&self) -> ErrorBody {
        let pointer = match self {
            CliError::Schema { pointer, .. } => Some(pointer.clone()),
            _ => None,
        };
        ErrorBody { message: self.to_string(), pointer }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointer: Option<String>,
}
