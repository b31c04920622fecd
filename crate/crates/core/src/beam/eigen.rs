//! Lowest natural frequencies: `K φ = λ M φ` with the lumped diagonal
//! mass, solved dense for small models and by subspace iteration with
//! the factored stiffness for larger ones.

use super::assemble::{build_dof_map, DofMap, DofState};
use super::element::{element_mass_lumped, element_stiffness};
use super::{BeamError, BeamModel, Result, DOF_PER_NODE};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DENSE_DOF_LIMIT: usize = 900;
const MAX_SUBSPACE_ITER: usize = 200;
const EIG_TOL: f64 = 1e-10;

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

fn lumped_mass_free(model: &BeamModel, dofs: &DofMap) -> Result<Vec<f64>> {
    let mut m = vec![0.0; dofs.free_count()];
    for idx in 0..model.elements.len() {
        let me = element_mass_lumped(model, idx)?;
        for (i, &g) in element_dofs(model, idx).iter().enumerate() {
            if let DofState::Free(f) = dofs.state[g] {
                m[f] += me[i];
            }
        }
    }
    Ok(m)
}

fn assemble_free_dense(model: &BeamModel, dofs: &DofMap) -> Result<DMatrix<f64>> {
    let n = dofs.free_count();
    let mut k = DMatrix::zeros(n, n);
    for idx in 0..model.elements.len() {
        let ke = element_stiffness(model, idx)?;
        let gd = element_dofs(model, idx);
        for (i, &gi) in gd.iter().enumerate() {
            let DofState::Free(fi) = dofs.state[gi] else { continue };
            for (j, &gj) in gd.iter().enumerate() {
                if let DofState::Free(fj) = dofs.state[gj] {
                    k[(fi, fj)] += ke[(i, j)];
                }
            }
        }
    }
    Ok(k)
}

/// The `count` smallest natural frequencies (Hz), ascending.
pub fn lowest_frequencies(model: &BeamModel, count: usize) -> Result<Vec<f64>> {
    model.validate()?;
    if model.constraints.clamped_nodes.is_empty() && model.constraints.prescribed.is_empty() {
        return Err(BeamError::NoConstraints);
    }
    let dofs = build_dof_map(model);
    let free = dofs.free_count();
    if count == 0 || count > free {
        return Err(BeamError::TooManyModes { count, free });
    }
    let mass = lumped_mass_free(model, &dofs)?;

    let lambdas = if free <= DENSE_DOF_LIMIT {
        dense_lambdas(model, &dofs, &mass, count)?
    } else {
        subspace_lambdas(model, &dofs, &mass, count)?
    };
    Ok(lambdas
        .into_iter()
        .map(|l| l.max(0.0).sqrt() / (2.0 * std::f64::consts::PI))
        .collect())
}

fn dense_lambdas(
    model: &BeamModel,
    dofs: &DofMap,
    mass: &[f64],
    count: usize,
) -> Result<Vec<f64>> {
    let k = assemble_free_dense(model, dofs)?;
    let n = dofs.free_count();
    // B = M^{-1/2} K M^{-1/2}, symmetric standard problem.
    let inv_sqrt: Vec<f64> = mass.iter().map(|&m| 1.0 / m.sqrt()).collect();
    let mut b = k;
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(b);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals.into_iter().take(count).collect())
}

fn subspace_lambdas(
    model: &BeamModel,
    dofs: &DofMap,
    mass: &[f64],
    count: usize,
) -> Result<Vec<f64>> {
    let n = dofs.free_count();
    let q = (2 * count + 8).min(n);
    let factor = super::solve::factor_free(model, dofs)?;

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut x = DMatrix::from_fn(n, q, |_, _| rng.gen_range(-1.0..1.0));
    let mut prev: Vec<f64> = vec![f64::INFINITY; count];

    for iter in 0..MAX_SUBSPACE_ITER {
        // Y = K⁻¹ M X.
        let mut y = DMatrix::zeros(n, q);
        for c in 0..q {
            let mut col: Vec<f64> = (0..n).map(|r| mass[r] * x[(r, c)]).collect();
            factor.solve(&mut col);
            for r in 0..n {
                y[(r, c)] = col[r];
            }
        }
        // Rayleigh–Ritz on the subspace: Kr = YᵀKY via K Y = M X (no:
        // K y_c = (M x)_c, so YᵀKY = Yᵀ M X). Mr = Yᵀ M Y.
        let mut kr = DMatrix::zeros(q, q);
        let mut mr = DMatrix::zeros(q, q);
        for a in 0..q {
            for b in 0..q {
                let mut skr = 0.0;
                let mut smr = 0.0;
                for r in 0..n {
                    skr += y[(r, a)] * mass[r] * x[(r, b)];
                    smr += y[(r, a)] * mass[r] * y[(r, b)];
                }
                kr[(a, b)] = skr;
                mr[(a, b)] = smr;
            }
        }
        // Generalized reduced problem via Cholesky of Mr.
        let chol = mr
            .clone()
            .cholesky()
            .ok_or(BeamError::EigenNoConvergence { iterations: iter, residual: f64::NAN })?;
        let li = chol.l().clone().try_inverse().ok_or(BeamError::EigenNoConvergence {
            iterations: iter,
            residual: f64::NAN,
        })?;
        let sym = &li * (&kr + kr.transpose()) * 0.5 * li.transpose();
        let eig = nalgebra::SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..q).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

        let lambdas: Vec<f64> = order.iter().take(count).map(|&i| eig.eigenvalues[i]).collect();
        // Ritz vectors back to full space: X = Y · L^{-T} · V (ordered).
        let vecs = li.transpose() * eig.eigenvectors;
        let mut xn = DMatrix::zeros(n, q);
        for (slot, &oi) in order.iter().enumerate() {
            for r in 0..n {
                let mut acc = 0.0;
                for a in 0..q {
                    acc += y[(r, a)] * vecs[(a, oi)];
                }
                xn[(r, slot)] = acc;
            }
        }
        x = xn;

        let worst = lambdas
            .iter()
            .zip(&prev)
            .map(|(l, p)| ((l - p) / l.abs().max(1e-300)).abs())
            .fold(0.0f64, f64::max);
        prev = lambdas.clone();
        if worst < EIG_TOL {
            return Ok(lambdas);
        }
    }
    Err(BeamError::EigenNoConvergence {
        iterations: MAX_SUBSPACE_ITER,
        residual: prev.first().cloned().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::assemble::assemble_stiffness;
    use crate::beam::{
        cantilever_frequency, BeamElement, Constraints, Material, ShearModel,
    };
    use nalgebra::Point3;

    fn cantilever(n: usize, length: f64, radius: f64, material: Material) -> BeamModel {
        let nodes = (0..=n)
            .map(|i| Point3::new(length * i as f64 / n as f64, 0.0, 0.0))
            .collect();
        let elements = (0..n)
            .map(|i| BeamElement { a: i, b: i + 1, radius, material })
            .collect();
        BeamModel {
            nodes,
            elements,
            constraints: Constraints { clamped_nodes: vec![0], prescribed: vec![] },
            shear: ShearModel::Timoshenko,
        }
    }

    #[test]
    fn solid_equivalent_cantilever_matches_closed_form() {
        // Circular section with I/A = t²/12 matches the rectangular
        // closed form: r = t/sqrt(3).
        let m = Material::inconel_718();
        let t: f64 = 0.00675;
        let r = t / 3.0f64.sqrt();
        let model = cantilever(30, 0.090, r, m);
        let f = lowest_frequencies(&model, 2).unwrap();
        let closed = cantilever_frequency(0.090, 0.040, t, &m).unwrap();
        let rel = (f[0] - closed).abs() / closed;
        assert!(rel < 0.05, "first mode {} vs closed form {closed} ({:.2}%)", f[0], rel * 100.0);
    }

    #[test]
    fn stiffer_material_scales_frequencies_by_two() {
        let m1 = Material { youngs_modulus: 200e9, poisson_ratio: 0.3, density: 7800.0 };
        let m4 = Material { youngs_modulus: 800e9, poisson_ratio: 0.3, density: 7800.0 };
        let f1 = lowest_frequencies(&cantilever(12, 0.5, 0.008, m1), 3).unwrap();
        let f4 = lowest_frequencies(&cantilever(12, 0.5, 0.008, m4), 3).unwrap();
        for (a, b) in f1.iter().zip(&f4) {
            assert!((b / a - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn too_many_modes_is_an_error() {
        let model = cantilever(2, 0.5, 0.008, Material::inconel_718());
        assert!(matches!(
            lowest_frequencies(&model, 10_000),
            Err(BeamError::TooManyModes { .. })
        ));
    }

    #[test]
    fn free_free_model_has_exactly_six_zero_modes() {
        // L-shaped 3-node frame, no constraints: rigid-body modes only.
        let material = Material::inconel_718();
        let model = BeamModel {
            nodes: vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(0.4, 0.0, 0.0),
                Point3::new(0.4, 0.3, 0.0),
            ],
            elements: vec![
                BeamElement { a: 0, b: 1, radius: 0.01, material },
                BeamElement { a: 1, b: 2, radius: 0.01, material },
            ],
            constraints: Constraints::default(),
            shear: ShearModel::Timoshenko,
        };
        let k = assemble_stiffness(&model).unwrap();
        let eig = nalgebra::SymmetricEigen::new((k.clone() + k.transpose()) * 0.5);
        let max_diag = (0..k.nrows()).map(|i| k[(i, i)]).fold(0.0f64, f64::max);
        let zero = eig
            .eigenvalues
            .iter()
            .filter(|&&l| l.abs() <= 1e-8 * max_diag)
            .count();
        assert_eq!(zero, 6);
    }

    #[test]
    fn subspace_agrees_with_dense() {
        let model = cantilever(25, 0.8, 0.006, Material::inconel_718());
        let dofs = build_dof_map(&model);
        let mass = lumped_mass_free(&model, &dofs).unwrap();
        let dense = dense_lambdas(&model, &dofs, &mass, 4).unwrap();
        let sub = subspace_lambdas(&model, &dofs, &mass, 4).unwrap();
        for (a, b) in dense.iter().zip(&sub) {
            assert!((a - b).abs() / a < 1e-6, "dense {a} vs subspace {b}");
        }
    }
}
