use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("u-vectors do not span R^{n} (rank {rank})")]
    NonSurjective { n: usize, rank: usize },

    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("point lies outside the moment image K (worst violation {violation:e})")]
    PointOutsideK { violation: f64 },

    #[error("sheet choice given for wall index {index}")]
    InvalidSheet { index: usize },

    #[error("no strictly interior point of K found within budget")]
    EmptyInterior,

    #[error("operation only supported for n = 1, got n = {n}")]
    UnsupportedDimension { n: usize },

    #[error("finite-difference error estimate {estimate:e} exceeds tolerance {tol:e}")]
    StepTooLarge { estimate: f64, tol: f64 },

    #[error("horizontal space does not split: condition (D) fails at this point")]
    DegenerateHere,

    #[error("invalid level constant: {0}")]
    InvalidLambda(String),

    #[error("parse error at line {line}, field `{field}`: {msg}")]
    Parse { line: usize, field: String, msg: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
