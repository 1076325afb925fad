use thiserror::Error;

use crate::measure::MeasurementBasis;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are incompatible, or a result would exceed 8×8.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A value lies outside the domain of the operation (unphysical state,
    /// out-of-range parameter, non-finite input).
    #[error("domain error: {0}")]
    Domain(String),

    /// The basis optimizer was still improving after its last refinement round.
    #[error(
        "optimizer did not converge after {rounds} refinement rounds \
         (last improvement {last_improvement:e}); best value {best_value} at \
         theta={}, phi={}",
        best_basis.theta(),
        best_basis.phi()
    )]
    Convergence {
        rounds: usize,
        last_improvement: f64,
        best_basis: MeasurementBasis,
        best_value: f64,
    },

    /// The two projective discord formulas disagreed beyond tolerance.
    #[error(
        "discord routes disagree: classical-correlation route {via_classical}, \
         post-measurement route {via_post_state}"
    )]
    RouteMismatch { via_classical: f64, via_post_state: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn dimension<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}
