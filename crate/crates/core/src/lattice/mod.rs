//! Lattice construction: tiling the macro volume's parametric domain,
//! composing solid tiles (or embedding beam cells), welding, and
//! extracting beam analysis meshes.

mod build;
mod embed;
mod extract;
mod field;
mod hex;

pub use build::{build_lattice, BuildOptions, LatticeCell, LatticeModel};
pub use embed::{embed_beam_cell, merge_graphs, MergeReport};
pub use extract::{extract_beam_model, BeamMesh};
pub use field::{FieldUnits, ParameterField};
pub use hex::{hex_mesh, HexMesh};

use crate::spline::SplineError;
use crate::tile::TileError;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum LatticeError {
    #[error("grid dimensions must be at least 1, got {0}x{1}x{2}")]
    EmptyGrid(usize, usize, usize),

    #[error("macro volume is degenerate: Jacobian determinant {det} at cell center ({u}, {v}, {w})")]
    DegenerateMacro { u: f64, v: f64, w: f64, det: f64 },

    #[error("inverted hex cell at grid index ({0}, {1}, {2})")]
    InvertedCell(usize, usize, usize),

    #[error("degenerate (zero-volume) cell for beam embedding")]
    DegenerateCell,

    #[error("weld tolerance must be non-negative, got {0}")]
    NegativeWeldTolerance(f64),

    #[error("grading value {value} at ({u}, {v}, {w}) outside the valid range [{lo}, {hi}]")]
    GradingOutOfRange { value: f64, u: f64, v: f64, w: f64, lo: f64, hi: f64 },

    #[error("lattice has no beam content to extract")]
    NoBeamContent,

    #[error("elements_per_strut must be at least 1")]
    NoElements,

    #[error("parameter field: {0}")]
    BadField(String),

    #[error(transparent)]
    Tile(#[from] TileError),

    #[error(transparent)]
    Spline(#[from] SplineError),
}

pub type Result<T> = std::result::Result<T, LatticeError>;
