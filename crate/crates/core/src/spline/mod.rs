//! Tensor-product B-spline/Bézier evaluation, derivatives, fitting,
//! composition approximation and offset-surface approximation.
//!
//! Control points live in `R^d` with `d = 3` for geometry and `d = 1`
//! for scalar fields (grading). Rational (weighted) evaluation is
//! supported for input geometry; fitting and composition outputs are
//! always polynomial.

mod basis;
mod compose;
mod fit;
mod offset;
mod shapes;
mod surface;
mod volume;

pub use basis::KnotVector;
pub use compose::{compose, compose_with, ComposeOptions, CompositionReport};
pub use fit::{fit_tensor_volume, fit_tricubic, FitReport};
pub use offset::{approximate_offset, approximate_offset_with, OffsetOptions, OffsetReport};
pub use shapes::{blade_like_macro, twisted_box_macro, BladeParams};
pub use surface::SplineSurface;
pub use volume::SplineVolume;

use thiserror::Error;

/// Errors from spline construction, evaluation and approximation.
#[derive(Error, Debug)]
pub enum SplineError {
    #[error("knot vector is not non-decreasing at index {0}")]
    KnotsNotSorted(usize),

    #[error("knot vector of degree {degree} needs at least {min} knots, got {got}")]
    TooFewKnots { degree: usize, min: usize, got: usize },

    #[error("knot vector is not clamped: the first/last {0} + 1 knots must coincide")]
    NotClamped(usize),

    #[error("parameter {value} outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("control grid size {expected} does not match point count {got}")]
    ControlGridMismatch { expected: usize, got: usize },

    #[error("weights must be strictly positive and match the control grid")]
    BadWeights,

    #[error("dimension {0} not supported here (expected {1})")]
    BadDimension(usize, usize),

    #[error("fit is underdetermined: {samples} samples for {controls} controls along direction {dir}")]
    Underdetermined { dir: usize, samples: usize, controls: usize },

    #[error("singular normal equations while fitting (direction {0})")]
    SingularFit(usize),

    #[error("tile image leaves the macro parametric domain at sample ({u}, {v}, {w})")]
    TileEscapesDomain { u: f64, v: f64, w: f64 },

    #[error("composition tolerance {tolerance} not met: achieved max deviation {achieved}")]
    ToleranceUnmet { tolerance: f64, achieved: f64 },

    #[error("degenerate (near-zero) surface normal at parameter ({u}, {v})")]
    DegenerateNormal { u: f64, v: f64 },

    #[error("offset distance must be non-negative, got {0}")]
    NegativeDistance(f64),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SplineError>;
