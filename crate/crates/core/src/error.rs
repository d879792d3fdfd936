use thiserror::Error;

use crate::model::{Assumption, ValidationReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown social node `{0}`")]
    UnknownSocialNode(String),

    #[error("unknown physical node `{0}`")]
    UnknownPhysicalNode(String),

    #[error("instance is invalid:\n{0}")]
    Validation(ValidationReport),

    #[error("{0} does not hold for this instance")]
    Assumption(Assumption),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{count} seed/open combinations exceed the oracle limit of {limit}; pass --force to run anyway")]
    OracleRefused { count: u128, limit: u128 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
