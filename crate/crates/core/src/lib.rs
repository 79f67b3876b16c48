pub mod analysis;
pub mod cli;
pub mod cone;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod level_set;
pub mod linalg;
pub mod lp;
pub mod scalar;
pub mod scenarios;
pub mod tolerance;

pub use error::{Error, Result};

// double-precision instantiations of the generic geometry types
pub type Point = cone::Point<f64>;
pub type MomentImagePoint = cone::MomentImagePoint<f64>;
pub type LevelSetPoint = level_set::LevelSetPoint<f64>;
pub type KillingVector = level_set::KillingVector<f64>;
pub type InducedStructure = level_set::InducedStructure<f64>;
pub type QOracle = level_set::QOracle<f64>;
pub type Tolerances = tolerance::Tolerances<f64>;
pub type Matrix = linalg::Matrix<f64>;
