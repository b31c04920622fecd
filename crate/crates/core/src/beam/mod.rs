//! Linear-elastic 3D Timoshenko beam finite elements with centrifugal
//! loading, statics, modal estimation, and the closed-form cantilever
//! frequency chain.
//!
//! 6 DOFs per node (3 translations, 3 rotations); circular sections
//! with A = πr², I = πr⁴/4, J = πr⁴/2 and shear correction
//! κ = 6(1+ν)/(7+6ν).

mod assemble;
mod eigen;
mod element;
mod frequency;
mod loads;
mod poisson;
mod solve;
mod stress;

pub use assemble::{assemble_stiffness, DofMap};
pub use eigen::lowest_frequencies;
pub use element::{element_mass_lumped, element_stiffness, element_stiffness_radius_derivative, ShearModel};
pub use frequency::{cantilever_frequency, frequency_area_scaled};
pub use loads::centrifugal_load;
pub use poisson::{effective_poisson, PoissonOptions};
pub use solve::solve_static;
pub use stress::ElementStress;

use crate::tile::BeamGraph;
use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DOF_PER_NODE: usize = 6;

#[derive(Error, Debug)]
pub enum BeamError {
    #[error("material invalid: {0}")]
    BadMaterial(String),

    #[error("element {0} has zero length")]
    ZeroLengthElement(usize),

    #[error("element {0} has non-positive radius")]
    BadRadius(usize),

    #[error("model has no elements")]
    EmptyModel,

    #[error("static solve needs at least one constrained node")]
    NoConstraints,

    #[error("floating substructure: connected component containing nodes {0:?} has no constrained DOF")]
    FloatingComponent(Vec<usize>),

    #[error("stiffness matrix is singular at DOF {0} (pivot {1})")]
    SingularPivot(usize, f64),

    #[error("solver residual too large: |Ku-f|/|f| = {0}")]
    ResidualTooLarge(f64),

    #[error("eigenvalue count {count} exceeds free DOFs {free}")]
    TooManyModes { count: usize, free: usize },

    #[error("eigen solve did not converge after {iterations} iterations (residual {residual})")]
    EigenNoConvergence { iterations: usize, residual: f64 },

    #[error("applied strain must be nonzero")]
    ZeroStrain,

    #[error("load case invalid: {0}")]
    BadLoadCase(String),
}

pub type Result<T> = std::result::Result<T, BeamError>;

/// Isotropic linear-elastic material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Young's modulus, Pa.
    pub youngs_modulus: f64,
    /// Poisson ratio.
    pub poisson_ratio: f64,
    /// Density, kg/m³.
    pub density: f64,
}

impl Material {
    /// Inconel 718-like default: E = 208 GPa, ν = 0.3, ρ = 8220 kg/m³.
    pub fn inconel_718() -> Self {
        Self { youngs_modulus: 208e9, poisson_ratio: 0.3, density: 8220.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.youngs_modulus > 0.0) {
            return Err(BeamError::BadMaterial("E must be positive".into()));
        }
        if !(self.density > 0.0) {
            return Err(BeamError::BadMaterial("density must be positive".into()));
        }
        if !(self.poisson_ratio > -1.0 && self.poisson_ratio < 0.5) {
            return Err(BeamError::BadMaterial(format!(
                "Poisson ratio {} outside (-1, 0.5)",
                self.poisson_ratio
            )));
        }
        Ok(())
    }

    pub fn shear_modulus(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }

    /// Shear correction factor for circular sections.
    pub fn shear_correction(&self) -> f64 {
        6.0 * (1.0 + self.poisson_ratio) / (7.0 + 6.0 * self.poisson_ratio)
    }
}

/// One 2-node beam element with a circular section.
#[derive(Debug, Clone, Copy)]
pub struct BeamElement {
    pub a: usize,
    pub b: usize,
    pub radius: f64,
    pub material: Material,
}

/// Kinematic boundary conditions: fully clamped nodes plus individually
/// prescribed DOF values.
#[derive(Debug, Clone, Default)]
pub struct Constraints {
    pub clamped_nodes: Vec<usize>,
    /// (global DOF index, prescribed value)
    pub prescribed: Vec<(usize, f64)>,
}

/// Assembled beam model.
#[derive(Debug, Clone)]
pub struct BeamModel {
    pub nodes: Vec<Point3<f64>>,
    pub elements: Vec<BeamElement>,
    pub constraints: Constraints,
    pub shear: ShearModel,
}

impl BeamModel {
    /// Builds a model from a strut graph with one material everywhere.
    pub fn from_graph(graph: &BeamGraph, material: Material) -> Result<Self> {
        material.validate()?;
        let elements = graph
            .edges()
            .iter()
            .map(|e| BeamElement { a: e.a, b: e.b, radius: e.radius, material })
            .collect();
        Ok(Self {
            nodes: graph.nodes().to_vec(),
            elements,
            constraints: Constraints::default(),
            shear: ShearModel::Timoshenko,
        })
    }

    pub fn dof_count(&self) -> usize {
        self.nodes.len() * DOF_PER_NODE
    }

    /// Clamps every node within `tol` of the half-space boundary
    /// `(p - point)·normal <= 0`.
    pub fn clamp_half_space(&mut self, point: Point3<f64>, normal: Vector3<f64>, tol: f64) {
        for (i, p) in self.nodes.iter().enumerate() {
            if (p - point).dot(&normal) <= tol {
                self.constraints.clamped_nodes.push(i);
            }
        }
        self.constraints.clamped_nodes.sort_unstable();
        self.constraints.clamped_nodes.dedup();
    }

    pub fn element_length(&self, e: &BeamElement) -> f64 {
        (self.nodes[e.b] - self.nodes[e.a]).norm()
    }

    /// Total mass `Σ ρ π r² ℓ`.
    pub fn total_mass(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| {
                e.material.density * std::f64::consts::PI * e.radius * e.radius
                    * self.element_length(e)
            })
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(BeamError::EmptyModel);
        }
        for (i, e) in self.elements.iter().enumerate() {
            if !(e.radius > 0.0) {
                return Err(BeamError::BadRadius(i));
            }
            if self.element_length(e) == 0.0 {
                return Err(BeamError::ZeroLengthElement(i));
            }
            e.material.validate()?;
        }
        Ok(())
    }

    /// Axis-aligned bounding box diagonal of the node set.
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.nodes {
            for c in 0..3 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        (hi - lo).norm()
    }
}

/// Centrifugal load case: rotation about an axis, plus the clamp rule.
#[derive(Debug, Clone)]
pub struct LoadCase {
    /// Angular speed, rad/s.
    pub omega: f64,
    pub axis_point: Point3<f64>,
    pub axis_dir: Vector3<f64>,
}

impl LoadCase {
    pub fn new(omega: f64, axis_point: Point3<f64>, axis_dir: Vector3<f64>) -> Result<Self> {
        if !(omega >= 0.0) {
            return Err(BeamError::BadLoadCase("omega must be >= 0".into()));
        }
        let n = axis_dir.norm();
        if n == 0.0 {
            return Err(BeamError::BadLoadCase("axis direction must be nonzero".into()));
        }
        Ok(Self { omega, axis_point, axis_dir: axis_dir / n })
    }

    pub fn from_rpm(rpm: f64, axis_point: Point3<f64>, axis_dir: Vector3<f64>) -> Result<Self> {
        Self::new(rpm * std::f64::consts::PI / 30.0, axis_point, axis_dir)
    }
}

/// Static solution: displacements, compliance, stresses, reactions.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Per-node 6-vector (m, rad).
    pub displacements: Vec<[f64; 6]>,
    /// f·u, J.
    pub compliance: f64,
    /// Max translational node displacement magnitude, m.
    pub max_deflection: f64,
    pub element_stress: Vec<ElementStress>,
    /// Sum of reaction forces at constrained DOFs (force part), N.
    pub reaction_sum: Vector3<f64>,
    pub residual_rel: f64,
    /// Set when max deflection exceeds 10% of the model bounding box
    /// (linear kinematics no longer trustworthy).
    pub large_deflection_warning: bool,
}
