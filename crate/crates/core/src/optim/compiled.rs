//! Problem compilation: the lattice topology, element→coefficient
//! couplings and clamp set do not depend on the design variables, so
//! they are built once; each evaluation only reassigns radii.

use super::{GradientMode, OptimError, Result};
use crate::beam::{
    centrifugal_load, element_stiffness_radius_derivative, solve_static, BeamElement, BeamModel,
    Constraints, LoadCase, Material, ShearModel, DOF_PER_NODE,
};
use crate::lattice::{hex_mesh, LatticeError, ParameterField};
use crate::spline::SplineVolume;
use crate::tile::{make_auxetic_cell, make_cross_tile, make_diagonal_tile, TileGeometry, TileKind, TileSpec};
use nalgebra::{Point3, SVector, Vector3};
use rayon::prelude::*;
use std::collections::HashMap;

/// The grading design problem: lattice template, load case, bounds and
/// optional mass budget. Design variables are the parameter-spline
/// coefficients.
#[derive(Debug, Clone)]
pub struct DesignProblem {
    pub macro_volume: SplineVolume,
    pub grid: [usize; 3],
    pub tile: TileSpec,
    /// Coefficient layout and units; its coefficient values are the
    /// initial design.
    pub field: ParameterField,
    pub material: Material,
    pub load: LoadCase,
    /// Nodes with `(p - clamp_point)·clamp_normal <= clamp_tol` are
    /// clamped.
    pub clamp_point: Point3<f64>,
    pub clamp_normal: Vector3<f64>,
    pub clamp_tol: f64,
    /// Box bounds on every coefficient (radius in m, or thickness as a
    /// cell fraction, per the field units).
    pub bounds: (f64, f64),
    pub mass_budget: Option<f64>,
    pub elements_per_strut: usize,
}

/// One strut segment of the compiled mesh.
struct CompiledElement {
    a: usize,
    b: usize,
    length: f64,
    /// Radius = `factor × field(midpoint)`.
    factor: f64,
    /// Sparse basis row of the field at the segment midpoint.
    basis: Vec<(usize, f64)>,
}

/// A design problem with its radius-independent structure prebuilt.
pub struct CompiledProblem {
    pub problem: DesignProblem,
    nodes: Vec<Point3<f64>>,
    elements: Vec<CompiledElement>,
    clamped: Vec<usize>,
    var_count: usize,
}

/// Welds points sharing exact (quantized) parametric coordinates.
struct NodeInterner {
    eps: f64,
    map: HashMap<[i64; 3], usize>,
    world: Vec<Point3<f64>>,
}

impl NodeInterner {
    fn new(eps: f64) -> Self {
        Self { eps, map: HashMap::new(), world: Vec::new() }
    }

    fn intern(&mut self, param: [f64; 3], world: Point3<f64>) -> usize {
        let key: [i64; 3] = std::array::from_fn(|c| (param[c] / self.eps).round() as i64);
        *self.map.entry(key).or_insert_with(|| {
            self.world.push(world);
            self.world.len() - 1
        })
    }
}

impl CompiledProblem {
    pub fn compile(problem: DesignProblem) -> Result<Self> {
        let (blo, bhi) = problem.bounds;
        if !(blo > 0.0 && bhi > blo) {
            return Err(OptimError::BadBounds(blo, bhi));
        }
        let [nx, ny, nz] = problem.grid;
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(OptimError::Lattice(LatticeError::EmptyGrid(nx, ny, nz)));
        }
        let dom = problem.macro_volume.domain();
        let span: [f64; 3] = std::array::from_fn(|c| dom.1[c] - dom.0[c]);
        let step: [f64; 3] = std::array::from_fn(|c| span[c] / problem.grid[c] as f64);
        let mut interner = NodeInterner::new(1e-9 * span.iter().cloned().fold(1.0, f64::max));
        let mut elements: Vec<CompiledElement> = Vec::new();
        let n_sub = problem.elements_per_strut.max(1);
        let normalized = |p: [f64; 3]| -> [f64; 3] {
            std::array::from_fn(|c| (p[c] - dom.0[c]) / span[c])
        };
        let sqrt_pi = std::f64::consts::PI.sqrt();

        match problem.tile.kind {
            TileKind::AuxeticDoubleV => {
                let hex = hex_mesh(&problem.macro_volume, problem.grid)?;
                let mut spec = problem.tile.clone();
                spec.strut_radius = 1.0;
                let TileGeometry::Beam(cell) = make_auxetic_cell(&spec)? else { unreachable!() };
                for (ci, _) in hex.cells.iter().enumerate() {
                    let corners = hex.cell_corners(ci);
                    let idx = [
                        ci % nx,
                        (ci / nx) % ny,
                        ci / (nx * ny),
                    ];
                    let lo: [f64; 3] =
                        std::array::from_fn(|c| dom.0[c] + step[c] * idx[c] as f64);
                    for e in cell.edges() {
                        let (la, lb) = (cell.nodes()[e.a], cell.nodes()[e.b]);
                        let pa: [f64; 3] = std::array::from_fn(|c| lo[c] + step[c] * la[c]);
                        let pb: [f64; 3] = std::array::from_fn(|c| lo[c] + step[c] * lb[c]);
                        let wa = trilinear_point(&corners, la);
                        let wb = trilinear_point(&corners, lb);
                        push_subdivided(
                            &mut interner,
                            &mut elements,
                            &problem.field,
                            pa,
                            pb,
                            wa,
                            wb,
                            n_sub,
                            1.0,
                            normalized,
                        )?;
                    }
                }
            }
            TileKind::CrossAxis | TileKind::CrossDiagonal => {
                let mut spec = problem.tile.clone();
                spec.arm_thickness = 0.2;
                let tile = match problem.tile.kind {
                    TileKind::CrossAxis => make_cross_tile(&spec)?,
                    _ => make_diagonal_tile(&spec)?,
                };
                let axes = tile.axes().to_vec();
                for k in 0..nz {
                    for j in 0..ny {
                        for i in 0..nx {
                            let idx = [i, j, k];
                            let lo: [f64; 3] =
                                std::array::from_fn(|c| dom.0[c] + step[c] * idx[c] as f64);
                            for axis in &axes {
                                let pa: [f64; 3] =
                                    std::array::from_fn(|c| lo[c] + step[c] * axis.a[c]);
                                let pb: [f64; 3] =
                                    std::array::from_fn(|c| lo[c] + step[c] * axis.b[c]);
                                // Equal-area reduction factor from the
                                // local cell scale (see extract).
                                let mid: [f64; 3] =
                                    std::array::from_fn(|c| 0.5 * (pa[c] + pb[c]));
                                let jac =
                                    problem.macro_volume.jacobian(mid[0], mid[1], mid[2])?;
                                let dir = (Vector3::from(pb) - Vector3::from(pa)).normalize();
                                let seed = if dir.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
                                let c1 = dir.cross(&seed).normalize();
                                let c2 = dir.cross(&c1);
                                let s1 = (jac * c1.component_mul(&Vector3::from(step))).norm();
                                let s2 = (jac * c2.component_mul(&Vector3::from(step))).norm();
                                let factor = (s1 * s2).sqrt() / sqrt_pi;
                                let wa = problem.macro_volume.eval_point(pa[0], pa[1], pa[2])?;
                                let wb = problem.macro_volume.eval_point(pb[0], pb[1], pb[2])?;
                                push_subdivided(
                                    &mut interner,
                                    &mut elements,
                                    &problem.field,
                                    pa,
                                    pb,
                                    wa,
                                    wb,
                                    n_sub,
                                    factor,
                                    normalized,
                                )?;
                            }
                        }
                    }
                }
            }
        }

        let nodes = interner.world;
        let clamped: Vec<usize> = nodes
            .iter()
            .enumerate()
            .filter(|(_, p)| (*p - problem.clamp_point).dot(&problem.clamp_normal) <= problem.clamp_tol)
            .map(|(i, _)| i)
            .collect();
        let (gu, gv, gw) = problem.field.grid();
        Ok(Self { var_count: gu * gv * gw, problem, nodes, elements, clamped })
    }

    pub fn variable_count(&self) -> usize {
        self.var_count
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn clamped_count(&self) -> usize {
        self.clamped.len()
    }

    fn check_bounds(&self, coeffs: &[f64]) -> Result<()> {
        let (lo, hi) = self.problem.bounds;
        for (index, &value) in coeffs.iter().enumerate() {
            let slack = 1e-12 * (hi - lo);
            if !(value >= lo - slack && value <= hi + slack) {
                return Err(OptimError::CoefficientOutOfBounds { index, value, lo, hi });
            }
        }
        Ok(())
    }

    fn radii(&self, coeffs: &[f64]) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| {
                let field: f64 = e.basis.iter().map(|&(j, w)| w * coeffs[j]).sum();
                e.factor * field
            })
            .collect()
    }

    fn model_with(&self, radii: &[f64]) -> BeamModel {
        let material = self.problem.material;
        BeamModel {
            nodes: self.nodes.clone(),
            elements: self
                .elements
                .iter()
                .zip(radii)
                .map(|(e, &r)| BeamElement { a: e.a, b: e.b, radius: r, material })
                .collect(),
            constraints: Constraints {
                clamped_nodes: self.clamped.clone(),
                prescribed: Vec::new(),
            },
            shear: ShearModel::Timoshenko,
        }
    }

    /// Total mass Σ ρ π r² ℓ for a coefficient vector.
    pub fn mass(&self, coeffs: &[f64]) -> f64 {
        let rho = self.problem.material.density;
        self.elements
            .iter()
            .zip(self.radii(coeffs))
            .map(|(e, r)| rho * std::f64::consts::PI * r * r * e.length)
            .sum()
    }

    /// Mass gradient with respect to the coefficients.
    pub fn mass_gradient(&self, coeffs: &[f64]) -> Vec<f64> {
        let rho = self.problem.material.density;
        let mut g = vec![0.0; self.var_count];
        for (e, r) in self.elements.iter().zip(self.radii(coeffs)) {
            let k = 2.0 * rho * std::f64::consts::PI * r * e.length * e.factor;
            for &(j, w) in &e.basis {
                g[j] += k * w;
            }
        }
        g
    }

    /// Rebuilds the graded beam model, solves statics under the
    /// centrifugal load, and returns `(compliance, mass)`.
    pub fn evaluate(&self, coeffs: &[f64]) -> Result<(f64, f64)> {
        self.check_bounds(coeffs)?;
        let radii = self.radii(coeffs);
        let model = self.model_with(&radii);
        let loads = centrifugal_load(&model, &self.problem.load).map_err(|source| {
            OptimError::SolverFailed { coefficients: coeffs.to_vec(), source }
        })?;
        let result = solve_static(&model, &loads).map_err(|source| OptimError::SolverFailed {
            coefficients: coeffs.to_vec(),
            source,
        })?;
        Ok((result.compliance, model.total_mass()))
    }

    /// Full static solution for the given design (post-processing).
    pub fn solve(&self, coeffs: &[f64]) -> Result<(BeamModel, crate::beam::SolveResult)> {
        self.check_bounds(coeffs)?;
        let model = self.model_with(&self.radii(coeffs));
        let loads = centrifugal_load(&model, &self.problem.load)?;
        let result = solve_static(&model, &loads).map_err(|source| OptimError::SolverFailed {
            coefficients: coeffs.to_vec(),
            source,
        })?;
        Ok((model, result))
    }

    /// Compliance gradient.
    pub fn gradient(&self, coeffs: &[f64], mode: GradientMode) -> Result<Vec<f64>> {
        match mode {
            GradientMode::FiniteDifference => self.gradient_fd(coeffs),
            GradientMode::SemiAnalytic => self.gradient_semi_analytic(coeffs),
        }
    }

    fn gradient_fd(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let (lo, hi) = self.problem.bounds;
        let h = 1e-6 * (hi - lo);
        (0..self.var_count)
            .into_par_iter()
            .map(|j| {
                let mut cp = coeffs.to_vec();
                let mut cm = coeffs.to_vec();
                // Stay inside the bounds near the box edges.
                cp[j] = (coeffs[j] + h).min(hi);
                cm[j] = (coeffs[j] - h).max(lo);
                let denom = cp[j] - cm[j];
                let (fp, _) = self.evaluate(&cp)?;
                let (fm, _) = self.evaluate(&cm)?;
                Ok((fp - fm) / denom)
            })
            .collect()
    }

    fn gradient_semi_analytic(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_bounds(coeffs)?;
        let radii = self.radii(coeffs);
        let model = self.model_with(&radii);
        let loads = centrifugal_load(&model, &self.problem.load)?;
        let result = solve_static(&model, &loads).map_err(|source| OptimError::SolverFailed {
            coefficients: coeffs.to_vec(),
            source,
        })?;
        let mut u = vec![0.0; model.dof_count()];
        for (i, d) in result.displacements.iter().enumerate() {
            u[i * DOF_PER_NODE..(i + 1) * DOF_PER_NODE].copy_from_slice(d);
        }

        let w2 = self.problem.load.omega * self.problem.load.omega;
        let axis_p = self.problem.load.axis_point;
        let axis_d = self.problem.load.axis_dir;

        let mut g = vec![0.0; self.var_count];
        for (idx, (e, &r)) in self.elements.iter().zip(&radii).enumerate() {
            // −uᵀ (∂K/∂r) u
            let dk = element_stiffness_radius_derivative(&model, idx)?;
            let el = &model.elements[idx];
            let mut ue = SVector::<f64, 12>::zeros();
            for c in 0..6 {
                ue[c] = u[el.a * DOF_PER_NODE + c];
                ue[6 + c] = u[el.b * DOF_PER_NODE + c];
            }
            let mut dc_dr = -(ue.transpose() * dk * ue)[(0, 0)];

            // +2 uᵀ (∂f/∂r): the centrifugal nodal force scales with r².
            if w2 > 0.0 {
                let (pa, pb) = (model.nodes[el.a], model.nodes[el.b]);
                let mass = el.material.density * std::f64::consts::PI * r * r * e.length;
                let mid = nalgebra::center(&pa, &pb);
                let rel = mid - axis_p;
                let radial = rel - rel.dot(&axis_d) * axis_d;
                let dforce = (2.0 / r) * mass * w2 * radial; // ∂(m ω² r_vec)/∂r
                let mut du_f = 0.0;
                for (node, clamped_half) in [(el.a, 0.5), (el.b, 0.5)] {
                    for c in 0..3 {
                        du_f += clamped_half * dforce[c] * u[node * DOF_PER_NODE + c];
                    }
                }
                dc_dr += 2.0 * du_f;
            }

            let k = dc_dr * e.factor;
            for &(j, w) in &e.basis {
                g[j] += k * w;
            }
        }
        Ok(g)
    }
}

fn trilinear_point(corners: &[Point3<f64>; 8], local: Point3<f64>) -> Point3<f64> {
    let mut acc = Vector3::zeros();
    for (m, c) in corners.iter().enumerate() {
        let fu = if m & 1 == 1 { local.x } else { 1.0 - local.x };
        let fv = if m & 2 == 2 { local.y } else { 1.0 - local.y };
        let fw = if m & 4 == 4 { local.z } else { 1.0 - local.z };
        acc += fu * fv * fw * c.coords;
    }
    Point3::from(acc)
}

#[allow(clippy::too_many_arguments)]
fn push_subdivided(
    interner: &mut NodeInterner,
    elements: &mut Vec<CompiledElement>,
    field: &ParameterField,
    pa: [f64; 3],
    pb: [f64; 3],
    wa: Point3<f64>,
    wb: Point3<f64>,
    n: usize,
    factor: f64,
    normalized: impl Fn([f64; 3]) -> [f64; 3],
) -> Result<()> {
    let mut prev: Option<usize> = None;
    for s in 0..=n {
        let t = s as f64 / n as f64;
        let p: [f64; 3] = std::array::from_fn(|c| pa[c] + (pb[c] - pa[c]) * t);
        let w = Point3::from(wa.coords + (wb.coords - wa.coords) * t);
        let node = interner.intern(p, w);
        if let Some(a) = prev {
            let t_mid = (s as f64 - 0.5) / n as f64;
            let pm: [f64; 3] = std::array::from_fn(|c| pa[c] + (pb[c] - pa[c]) * t_mid);
            let nm = normalized(pm);
            let row = field
                .basis_row(nm[0], nm[1], nm[2])
                .map_err(OptimError::Lattice)?;
            let basis: Vec<(usize, f64)> = row
                .into_iter()
                .enumerate()
                .filter(|&(_, w)| w != 0.0)
                .collect();
            let length = (interner.world[node] - interner.world[a]).norm();
            elements.push(CompiledElement { a, b: node, length, factor, basis });
        }
        prev = Some(node);
    }
    Ok(())
}
