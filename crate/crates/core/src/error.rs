//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("symbol is not finite at wavenumber {xi}")]
    SingularSymbol { xi: f64 },

    #[error("bilinear symbol is not finite at ({xi}, {zeta})")]
    SingularBilinear { xi: f64, zeta: f64 },

    #[error("input has non-negligible mean {mean:e}; operator undefined on constants")]
    MeanMode { mean: f64 },

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown tag `{0}`")]
    UnknownTag(String),

    #[error("surface too steep: max |eta_x| = {slope} (limit {limit})")]
    Steepness { slope: f64, limit: f64 },

    #[error("fixed-point iteration diverged after {iterations} iterations (residual {residual:e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("conformal map near degenerate: min J = {j_min:e}")]
    NearDegenerate { j_min: f64 },

    #[error("point ({x}, {y}) lies outside the fluid domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("Newton iteration stalled at ({x}, {y}) with residual {residual:e}")]
    NewtonStall { x: f64, y: f64, residual: f64 },

    #[error("solution became unstable at t = {t}: {detail}")]
    Instability { t: f64, detail: String },

    #[error("weight exponent r = {r} must exceed 1/2")]
    NonIntegrableWeight { r: f64 },

    #[error("no admissible split found: {0}")]
    SplitFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
