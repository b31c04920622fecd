//! Gradient-based grading optimization: minimize compliance under the
//! centrifugal load with a mass budget and box bounds on the parameter
//! spline coefficients.

mod compiled;
mod sqp;

pub use compiled::{CompiledProblem, DesignProblem};
pub use sqp::{optimize, OptimizationTrace, OptimizeSettings, TraceRow};

use crate::beam::BeamError;
use crate::lattice::LatticeError;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum OptimError {
    #[error("bounds invalid: need 0 < min < max, got [{0}, {1}]")]
    BadBounds(f64, f64),

    #[error("coefficient {index} = {value} outside bounds [{lo}, {hi}]")]
    CoefficientOutOfBounds { index: usize, value: f64, lo: f64, hi: f64 },

    #[error("mass budget {budget} kg is infeasible: even the all-lower-bound design weighs {min_mass} kg")]
    InfeasibleBudget { budget: f64, min_mass: f64 },

    #[error("solver failed at coefficients {coefficients:?}: {source}")]
    SolverFailed {
        coefficients: Vec<f64>,
        #[source]
        source: BeamError,
    },

    #[error(transparent)]
    Lattice(#[from] LatticeError),

    #[error(transparent)]
    Beam(#[from] BeamError),
}

pub type Result<T> = std::result::Result<T, OptimError>;

/// How to compute design sensitivities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    /// Central finite differences, step 1e-6 × bound range.
    FiniteDifference,
    /// `dC/dp = −uᵀ(∂K/∂p)u + 2uᵀ(∂f/∂p)` with the design-dependent
    /// centrifugal load.
    SemiAnalytic,
}
