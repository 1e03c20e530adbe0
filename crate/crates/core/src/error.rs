use thiserror::Error;

/// Everything that can go wrong between reading a configuration and
/// emitting a report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("integer overflow evaluating {what}")]
    Overflow { what: String },

    #[error("point lies on or outside the unit ball (norm {norm})")]
    OutsideUnitBall { norm: f64 },

    #[error(
        "contraction hypothesis violated: branch {branch} maps boundary sample {sample} \
         to normalized radius {radius}"
    )]
    ContractionViolated {
        branch: usize,
        sample: usize,
        radius: f64,
    },

    #[error("family has an infinite tail but no certified tail weight bound")]
    MissingTailBound,

    #[error("non-finite value evaluating branch {branch}")]
    NonFinite { branch: usize },

    #[error("assembly failed at column {column}, sample {sample}: {source}")]
    Assembly {
        column: usize,
        sample: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("eigenvalue solver did not converge for a {size}x{size} matrix")]
    EigenSolver { size: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
