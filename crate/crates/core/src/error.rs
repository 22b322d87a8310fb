use thiserror::Error;

use crate::measurement::PairOutcome;
use crate::protocols::BellTarget;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("non-finite value for {name}: {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("outcome {0} is unreachable (probability below threshold)")]
    UnreachableOutcome(PairOutcome),

    #[error("J0 = 0: side and central pairs are decoupled, no protocol reaches the target")]
    NoIsingCoupling,

    #[error("no recipe in source protocol family for target {0}")]
    UnsupportedTarget(BellTarget),

    #[error("{0}")]
    Recipe(String),

    #[error("side-pair preparation mirrors the central recipes only at J = Jz (got J = {j}, Jz = {jz})")]
    AnisotropicDimer { j: f64, jz: f64 },

    #[error("unknown axis name '{0}'")]
    UnknownAxis(String),

    #[error("invalid axis '{name}': {reason}")]
    InvalidAxis { name: String, reason: String },

    #[error("unknown parameter name '{0}'")]
    UnknownParameter(String),

    #[error("parameter '{0}' is given twice (directly and through a scaled axis)")]
    ParameterConflict(String),

    #[error("sweep needs parameter '{0}' (set it as an axis or a fixed value)")]
    MissingParameter(String),

    #[error("non-finite result at {coords}")]
    NonFiniteResult { coords: String },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
