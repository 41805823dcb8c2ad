use thiserror::Error;

/// Errors surfaced by the geometric and homological pipeline.
///
/// Variants that correspond to bad *input* carry enough context to point the
/// user at the offending curve or line; variants that correspond to internal
/// consistency failures are bugs and are worded as such.
#[derive(Debug, Error)]
pub enum QfError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid surface data: {0}")]
    Surface(String),

    #[error("curve {name} is not embedded: {msg}")]
    NotEmbedded { name: String, msg: String },

    #[error("curves are not in general position: {0}")]
    Degenerate(String),

    #[error("cannot twist along {0}: it is an arc, not a closed curve")]
    TwistAlongArc(String),

    #[error("invalid fibration data: {0}")]
    Fibration(String),

    #[error("attaching cycles are not disjoint: {0}")]
    CyclesNotDisjoint(String),

    #[error("attaching cycles are homologically dependent: {0}")]
    CyclesDependent(String),

    #[error("admissibility winding failed after {max} rounds: {msg}")]
    WindingExceeded { max: usize, msg: String },

    #[error("sutured data is not balanced: {0}")]
    Unbalanced(String),

    #[error("differential does not square to zero: {0}")]
    DSquared(String),

    #[error("coefficient ring error: {0}")]
    Ring(#[from] qfloer_novikov::NovError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, QfError>;

impl QfError {
    pub fn internal(msg: impl Into<String>) -> Self {
        QfError::Internal(msg.into())
    }

    pub fn surface(msg: impl Into<String>) -> Self {
        QfError::Surface(msg.into())
    }
}
