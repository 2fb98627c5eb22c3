use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what} = {value} out of range [{min}, {max}]")]
    Range { what: &'static str, value: i64, min: i64, max: i64 },

    #[error("{0} is undefined for this input")]
    UndefinedMetric(&'static str),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("design matrix is rank deficient at column `{column}`")]
    RankDeficient { column: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("failed to load {path}: {reason}")]
    Load { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
