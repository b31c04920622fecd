//! Parametric micro-tile generators and manufacturability checks.
//!
//! All tiles live in the unit cell `[0,1]^3`. Solid tiles are sets of
//! spline volumes built so that arms meet cell faces centered and at a
//! right angle; beam tiles are small strut graphs whose boundary nodes
//! sit symmetrically on the cell so that adjacent cells share them.

mod auxetic;
mod checks;
mod cross;
mod diagonal;
mod graph;

pub use auxetic::make_auxetic_cell;
pub use checks::{
    check_interface_compatibility, check_printability, face_section_area, FaceCheck,
    InterfaceReport, PrintabilityReport,
};
pub use cross::{cross_tile_with_arm_thickness, make_cross_tile};
pub use diagonal::make_diagonal_tile;
pub use graph::{orthogonal_lattice_graph, BeamGraph, GraphEdge};

use crate::spline::{SplineError, SplineVolume};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum TileError {
    #[error("parameter {name} = {value} outside the valid range [{lo}, {hi}]")]
    ParamOutOfRange { name: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("growth direction must be a nonzero vector")]
    ZeroGrowthVector,

    #[error("tile kind {0:?} does not match this generator")]
    WrongKind(TileKind),

    #[error("beam graph: {0}")]
    BadGraph(String),

    #[error(transparent)]
    Spline(#[from] SplineError),
}

pub type Result<T> = std::result::Result<T, TileError>;

/// The three tile families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TileKind {
    CrossAxis,
    CrossDiagonal,
    AuxeticDoubleV,
}

/// One of the six faces of the unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Face {
    XNeg,
    XPos,
    YNeg,
    YPos,
    ZNeg,
    ZPos,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::XNeg, Face::XPos, Face::YNeg, Face::YPos, Face::ZNeg, Face::ZPos];

    /// Axis index (0 = x, 1 = y, 2 = z).
    pub fn axis(self) -> usize {
        match self {
            Face::XNeg | Face::XPos => 0,
            Face::YNeg | Face::YPos => 1,
            Face::ZNeg | Face::ZPos => 2,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Face::XPos | Face::YPos | Face::ZPos)
    }

    /// Face plane coordinate along its axis (0.0 or 1.0).
    pub fn coordinate(self) -> f64 {
        if self.is_positive() {
            1.0
        } else {
            0.0
        }
    }

    /// Center of the face in unit-cell coordinates.
    pub fn center(self) -> [f64; 3] {
        let mut c = [0.5, 0.5, 0.5];
        c[self.axis()] = self.coordinate();
        c
    }

    /// Outward unit normal.
    pub fn normal(self) -> [f64; 3] {
        let mut n = [0.0, 0.0, 0.0];
        n[self.axis()] = if self.is_positive() { 1.0 } else { -1.0 };
        n
    }
}

/// Parametric description of a micro-tile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TileSpec {
    pub kind: TileKind,
    /// Arm/strut cross-section side, as a fraction of the cell, in (0, 0.5).
    pub arm_thickness: f64,
    /// Corner rounding: 0 = sharp, 1 = fully rounded (inscribed disk).
    pub roundness: f64,
    /// Skin slab thickness on attach faces, fraction of cell in [0, 0.25].
    pub skin_thickness: f64,
    /// Faces carrying attachment geometry (and skin, when thickness > 0).
    pub attach_faces: Vec<Face>,
    /// Beam-cell strut radius in meters (auxetic cells).
    pub strut_radius: f64,
    /// Angle of the deep V struts from horizontal, degrees, in (0, 90).
    pub reentrant_angle_deg: f64,
    /// Join the hanging nodes by the two-edge vertical strut.
    pub include_vertical_strut: bool,
}

impl TileSpec {
    pub fn cross(arm_thickness: f64) -> Self {
        Self { kind: TileKind::CrossAxis, arm_thickness, ..Self::base() }
    }

    pub fn diagonal(arm_thickness: f64) -> Self {
        Self { kind: TileKind::CrossDiagonal, arm_thickness, ..Self::base() }
    }

    pub fn auxetic(strut_radius: f64) -> Self {
        Self { kind: TileKind::AuxeticDoubleV, strut_radius, ..Self::base() }
    }

    fn base() -> Self {
        Self {
            kind: TileKind::CrossAxis,
            arm_thickness: 0.15,
            roundness: 0.0,
            skin_thickness: 0.0,
            attach_faces: Vec::new(),
            strut_radius: 2.0e-4,
            reentrant_angle_deg: 70.0,
            include_vertical_strut: true,
        }
    }

    pub fn with_roundness(mut self, r: f64) -> Self {
        self.roundness = r;
        self
    }

    pub fn with_skin(mut self, s: f64, faces: Vec<Face>) -> Self {
        self.skin_thickness = s;
        self.attach_faces = faces;
        self
    }
}

/// What a solid piece of a tile is for; arms know which face they meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceRole {
    Core,
    Arm { face: Face },
    Skin { face: Face },
}

/// One spline volume of a solid tile plus its structural role.
///
/// Arm pieces follow the convention that their local `w` parameter runs
/// along the arm with `w = 1` on the cell face they meet.
#[derive(Debug, Clone)]
pub struct SolidPiece {
    pub volume: SplineVolume,
    pub role: PieceRole,
}

/// Centerline of one strut of a solid tile, for beam-model reduction.
/// Coordinates in unit-cell space; `thickness` is the square section
/// side (the equal-area circular radius is `thickness / sqrt(pi)`).
#[derive(Debug, Clone, Copy)]
pub struct StrutAxis {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub thickness: f64,
}

impl StrutAxis {
    /// Equal-area circular radius of the square section, in cell units.
    pub fn equivalent_radius(&self) -> f64 {
        self.thickness / std::f64::consts::PI.sqrt()
    }
}

/// Realized geometry of one tile: spline solids (with reduction axes)
/// or a beam graph.
#[derive(Debug, Clone)]
pub enum TileGeometry {
    Solid { pieces: Vec<SolidPiece>, axes: Vec<StrutAxis> },
    Beam(BeamGraph),
}

impl TileGeometry {
    pub fn solid_pieces(&self) -> &[SolidPiece] {
        match self {
            TileGeometry::Solid { pieces, .. } => pieces,
            TileGeometry::Beam(_) => &[],
        }
    }

    pub fn graph(&self) -> Option<&BeamGraph> {
        match self {
            TileGeometry::Beam(g) => Some(g),
            TileGeometry::Solid { .. } => None,
        }
    }

    pub fn axes(&self) -> &[StrutAxis] {
        match self {
            TileGeometry::Solid { axes, .. } => axes,
            TileGeometry::Beam(_) => &[],
        }
    }

    /// Material volume: Jacobian integration for solids, sum of
    /// cylinder volumes for beam graphs.
    pub fn material_volume(&self) -> Result<f64> {
        match self {
            TileGeometry::Solid { pieces, .. } => {
                let mut total = 0.0;
                for p in pieces {
                    total += p.volume.material_volume(3)?;
                }
                Ok(total)
            }
            TileGeometry::Beam(g) => Ok(g.material_volume()),
        }
    }

    /// Max distance any sampled point strays outside `[0,1]^3`.
    pub fn containment_defect(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        let mut check = |p: [f64; 3]| {
            for c in p {
                worst = worst.max(-c).max(c - 1.0);
            }
        };
        match self {
            TileGeometry::Beam(g) => {
                for n in g.nodes() {
                    check([n.x, n.y, n.z]);
                }
            }
            TileGeometry::Solid { pieces, .. } => {
                for piece in pieces {
                    let n = 6;
                    for k in 0..=n {
                        for j in 0..=n {
                            for i in 0..=n {
                                let p = piece.volume.eval_point(
                                    i as f64 / n as f64,
                                    j as f64 / n as f64,
                                    k as f64 / n as f64,
                                )?;
                                check([p.x, p.y, p.z]);
                            }
                        }
                    }
                }
            }
        }
        Ok(worst)
    }
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !(value > lo && value < hi) {
        return Err(TileError::ParamOutOfRange { name, value, lo, hi });
    }
    Ok(())
}
