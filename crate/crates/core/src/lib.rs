//! Graded free-form lattice microstructures inside spline-defined volumes.
//!
//! The crate is organized around the pipeline it supports:
//!
//! - [`spline`] — tensor-product B-spline/Bézier evaluation, fitting,
//!   functional composition and offset approximation;
//! - [`tile`] — parametric micro-tile generators (axis cross, diagonal
//!   cross, double-V auxetic beam cell) with interface and printability
//!   checks;
//! - [`lattice`] — populating a macro volume with tiles, hex meshing,
//!   affine cell embedding, graph welding and beam-model extraction;
//! - [`beam`] — 3D Timoshenko beam finite elements with centrifugal
//!   loading, statics, modal estimation and the closed-form cantilever
//!   frequency;
//! - [`optim`] — gradient-based grading optimization (compliance under a
//!   mass budget with box bounds);
//! - [`inspect`] — signed-distance deviation of measured point clouds
//!   against nominal tessellated geometry;
//! - [`formats`] / [`config`] — the plain-text file formats and the
//!   project configuration that drives the CLI.
//!
//! All internal lengths are meters; file interfaces may declare
//! millimeters and are converted on load.

pub mod config;
pub mod formats;
pub mod inspect;
pub mod lattice;
pub mod optim;
pub mod spline;
pub mod tile;

pub mod beam;

pub use spline::{KnotVector, SplineSurface, SplineVolume};

