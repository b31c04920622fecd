//! Static solution: skyline LDLᵀ after RCM ordering for direct solves,
//! Jacobi-preconditioned conjugate gradients above the direct-size
//! threshold.

use super::assemble::{build_dof_map, check_grounded, DofMap, DofState};
use super::element::{element_local, element_stiffness};
use super::stress::element_stresses;
use super::{BeamError, BeamModel, Result, SolveResult, DOF_PER_NODE};
use nalgebra::Vector3;

/// Above this many free DOFs the solver switches to PCG.
pub const DIRECT_DOF_LIMIT: usize = 200_000;
const RESIDUAL_TARGET: f64 = 1e-8;

/// Symmetric skyline (profile) storage: column `j` holds rows
/// `j - height[j] ..= j`.
pub(crate) struct Skyline {
    n: usize,
    start: Vec<usize>, // offset of column j's first stored row
    row0: Vec<usize>,  // first stored row index of column j
    data: Vec<f64>,
}

impl Skyline {
    fn new(heights: &[usize]) -> Self {
        let n = heights.len();
        let mut start = Vec::with_capacity(n + 1);
        let mut row0 = Vec::with_capacity(n);
        let mut off = 0;
        for (j, &h) in heights.iter().enumerate() {
            start.push(off);
            row0.push(j - h);
            off += h + 1;
        }
        start.push(off);
        Self { n, start, row0, data: vec![0.0; off] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        debug_assert!(i <= j);
        if i < self.row0[j] {
            return None;
        }
        Some(self.start[j] + (i - self.row0[j]))
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let at = self.idx(i, j).expect("entry inside the profile by construction");
        self.data[at] += v;
    }

    /// In-place LDLᵀ (active-column factorization).
    fn factor_ldlt(&mut self) -> Result<()> {
        let n = self.n;
        let mut diag_scale = 0.0f64;
        for j in 0..n {
            if let Some(at) = self.idx(j, j) {
                diag_scale = diag_scale.max(self.data[at].abs());
            }
        }
        let pivot_floor = 1e-14 * diag_scale.max(1e-300);

        for j in 0..n {
            let mj = self.row0[j];
            // G[i,j] = K[i,j] - Σ_{k<i} L[k,i] G[k,j]
            for i in (mj + 1)..j {
                let mi = self.row0[i];
                let k0 = mi.max(mj);
                let mut sum = 0.0;
                for k in k0..i {
                    let a = self.data[self.start[i] + (k - mi)];
                    let b = self.data[self.start[j] + (k - mj)];
                    sum += a * b;
                }
                let at = self.start[j] + (i - mj);
                self.data[at] -= sum;
            }
            // D[j] and L[i,j] = G[i,j]/D[i]
            let mut djj = self.data[self.start[j] + (j - mj)];
            for i in mj..j {
                let at = self.start[j] + (i - mj);
                let g = self.data[at];
                let di = self.data[self.start[i] + (i - self.row0[i])];
                let l = g / di;
                djj -= l * g;
                self.data[at] = l;
            }
            if !(djj.abs() > pivot_floor) || !djj.is_finite() {
                return Err(BeamError::SingularPivot(j, djj));
            }
            let at = self.start[j] + (j - mj);
            self.data[at] = djj;
        }
        Ok(())
    }

    /// Solves `L D Lᵀ x = b` in place.
    pub(crate) fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        // Forward: L y = b.
        for j in 0..n {
            let mj = self.row0[j];
            let mut sum = b[j];
            for i in mj..j {
                sum -= self.data[self.start[j] + (i - mj)] * b[i];
            }
            b[j] = sum;
        }
        // Diagonal.
        for j in 0..n {
            b[j] /= self.data[self.start[j] + (j - self.row0[j])];
        }
        // Backward: Lᵀ x = y.
        for j in (0..n).rev() {
            let mj = self.row0[j];
            let xj = b[j];
            for i in mj..j {
                b[i] -= self.data[self.start[j] + (i - mj)] * xj;
            }
        }
    }
}

/// Element DOF → global DOF map.
fn element_dofs(model: &BeamModel, idx: usize) -> [usize; 12] {
    let el = &model.elements[idx];
    std::array::from_fn(|i| {
        if i < 6 {
            el.a * DOF_PER_NODE + i
        } else {
            el.b * DOF_PER_NODE + (i - 6)
        }
    })
}

/// y += K_free · x on the reduced system, via an element loop.
fn matvec_free(model: &BeamModel, dofs: &DofMap, x: &[f64], y: &mut [f64]) -> Result<()> {
    for idx in 0..model.elements.len() {
        let ke = element_stiffness(model, idx)?;
        let gd = element_dofs(model, idx);
        for (i, &gi) in gd.iter().enumerate() {
            let DofState::Free(fi) = dofs.state[gi] else { continue };
            let mut acc = 0.0;
            for (j, &gj) in gd.iter().enumerate() {
                if let DofState::Free(fj) = dofs.state[gj] {
                    acc += ke[(i, j)] * x[fj];
                }
            }
            y[fi] += acc;
        }
    }
    Ok(())
}

fn solve_pcg(model: &BeamModel, dofs: &DofMap, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    // Jacobi preconditioner from assembled diagonal.
    let mut diag = vec![0.0; n];
    for idx in 0..model.elements.len() {
        let ke = element_stiffness(model, idx)?;
        let gd = element_dofs(model, idx);
        for (i, &gi) in gd.iter().enumerate() {
            if let DofState::Free(fi) = dofs.state[gi] {
                diag[fi] += ke[(i, i)];
            }
        }
    }
    let precond = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = r[i] / diag[i].max(1e-300);
        }
    };
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let norm_b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 20 * n;
    for _ in 0..max_iter {
        let mut ap = vec![0.0; n];
        matvec_free(model, dofs, &p, &mut ap)?;
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(BeamError::SingularPivot(0, pap));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rn / norm_b < RESIDUAL_TARGET {
            return Ok(x);
        }
        precond(&r, &mut z);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(BeamError::ResidualTooLarge(
        r.iter().map(|v| v * v).sum::<f64>().sqrt() / norm_b,
    ))
}

/// Assembles and factors the free-DOF stiffness (skyline LDLᵀ).
pub(crate) fn factor_free(model: &BeamModel, dofs: &DofMap) -> Result<Skyline> {
    let n = dofs.free_count();
    // Column heights from element connectivity.
    let mut heights = vec![0usize; n];
    for idx in 0..model.elements.len() {
        let gd = element_dofs(model, idx);
        let frees: Vec<usize> = gd
            .iter()
            .filter_map(|&g| match dofs.state[g] {
                DofState::Free(f) => Some(f),
                _ => None,
            })
            .collect();
        if let Some(&min) = frees.iter().min() {
            for &f in &frees {
                heights[f] = heights[f].max(f - min);
            }
        }
    }
    let mut sky = Skyline::new(&heights);
    for idx in 0..model.elements.len() {
        let ke = element_stiffness(model, idx)?;
        let gd = element_dofs(model, idx);
        for (i, &gi) in gd.iter().enumerate() {
            let DofState::Free(fi) = dofs.state[gi] else { continue };
            for (j, &gj) in gd.iter().enumerate() {
                if let DofState::Free(fj) = dofs.state[gj] {
                    if fi <= fj {
                        sky.add(fi, fj, ke[(i, j)]);
                    }
                }
            }
        }
    }
    sky.factor_ldlt()?;
    Ok(sky)
}

fn solve_direct(model: &BeamModel, dofs: &DofMap, rhs: &[f64]) -> Result<Vec<f64>> {
    let sky = factor_free(model, dofs)?;
    let mut x = rhs.to_vec();
    sky.solve(&mut x);
    Ok(x)
}

/// Solves `K u = f` under the model's constraints and post-processes
/// compliance, stresses and reactions. `loads` has one entry per global
/// DOF (6 per node).
pub fn solve_static(model: &BeamModel, loads: &[f64]) -> Result<SolveResult> {
    model.validate()?;
    if loads.len() != model.dof_count() {
        return Err(BeamError::BadLoadCase(format!(
            "load vector has {} entries, model has {} DOFs",
            loads.len(),
            model.dof_count()
        )));
    }
    let dofs = build_dof_map(model);
    if dofs.free_count() == model.dof_count() {
        return Err(BeamError::NoConstraints);
    }
    if model.constraints.clamped_nodes.is_empty() && model.constraints.prescribed.is_empty() {
        return Err(BeamError::NoConstraints);
    }
    check_grounded(model, &dofs)?;

    // Reduced RHS: f_f − K_fc u_c.
    let mut rhs = vec![0.0; dofs.free_count()];
    for (g, s) in dofs.state.iter().enumerate() {
        if let DofState::Free(f) = s {
            rhs[*f] = loads[g];
        }
    }
    let has_prescribed = dofs.state.iter().any(|s| matches!(s, DofState::Fixed(v) if *v != 0.0));
    if has_prescribed {
        for idx in 0..model.elements.len() {
            let ke = element_stiffness(model, idx)?;
            let gd = element_dofs(model, idx);
            for (i, &gi) in gd.iter().enumerate() {
                let DofState::Free(fi) = dofs.state[gi] else { continue };
                for (j, &gj) in gd.iter().enumerate() {
                    if let DofState::Fixed(v) = dofs.state[gj] {
                        if v != 0.0 {
                            rhs[fi] -= ke[(i, j)] * v;
                        }
                    }
                }
            }
        }
    }

    let reduced = if dofs.free_count() <= DIRECT_DOF_LIMIT {
        solve_direct(model, &dofs, &rhs)?
    } else {
        solve_pcg(model, &dofs, &rhs)?
    };

    // Residual check on the reduced system.
    let mut ku = vec![0.0; dofs.free_count()];
    matvec_free(model, &dofs, &reduced, &mut ku)?;
    let norm_b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let resid = rhs
        .iter()
        .zip(&ku)
        .map(|(b, a)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    let residual_rel = if norm_b > 0.0 { resid / norm_b } else { resid };
    if residual_rel > RESIDUAL_TARGET && norm_b > 0.0 {
        return Err(BeamError::ResidualTooLarge(residual_rel));
    }

    let full = dofs.expand(&reduced);
    let displacements: Vec<[f64; 6]> = full
        .chunks_exact(DOF_PER_NODE)
        .map(|c| [c[0], c[1], c[2], c[3], c[4], c[5]])
        .collect();
    let compliance: f64 = loads.iter().zip(&full).map(|(f, u)| f * u).sum();
    let max_deflection = displacements
        .iter()
        .map(|d| (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt())
        .fold(0.0, f64::max);

    // Reactions at fixed DOFs: r = (K u)_c − f_c (element loop).
    let mut reaction = vec![0.0; model.dof_count()];
    for idx in 0..model.elements.len() {
        let ke = element_stiffness(model, idx)?;
        let gd = element_dofs(model, idx);
        for (i, &gi) in gd.iter().enumerate() {
            if matches!(dofs.state[gi], DofState::Fixed(_)) {
                let mut acc = 0.0;
                for (j, &gj) in gd.iter().enumerate() {
                    acc += ke[(i, j)] * full[gj];
                }
                reaction[gi] += acc;
            }
        }
    }
    let mut reaction_sum = Vector3::zeros();
    for (g, s) in dofs.state.iter().enumerate() {
        if matches!(s, DofState::Fixed(_)) {
            let c = g % DOF_PER_NODE;
            if c < 3 {
                reaction_sum[c] += reaction[g] - loads[g];
            }
        }
    }

    let element_stress = element_stresses(model, &full, element_local)?;
    let large_deflection_warning = max_deflection > 0.1 * model.bbox_diagonal();

    Ok(SolveResult {
        displacements,
        compliance,
        max_deflection,
        element_stress,
        reaction_sum,
        residual_rel,
        large_deflection_warning,
    })
}
