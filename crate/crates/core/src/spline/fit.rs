//! Least-squares tensor-product fitting on gridded samples.
//!
//! Sampling on a parameter grid makes the normal equations separable:
//! one small symmetric solve per direction instead of one giant system.

use super::{KnotVector, Result, SplineError, SplineSurface, SplineVolume};
use nalgebra::DMatrix;

/// Residual summary of a least-squares fit, measured back at the samples.
#[derive(Debug, Clone, Copy)]
pub struct FitReport {
    pub max_residual: f64,
    pub rms_residual: f64,
}

/// Basis matrix `B[s][i] = N_i(params[s])` for one direction.
pub(crate) fn basis_matrix(kv: &KnotVector, params: &[f64]) -> Result<DMatrix<f64>> {
    let n = kv.num_basis();
    let mut b = DMatrix::zeros(params.len(), n);
    for (s, &t) in params.iter().enumerate() {
        let (first, vals) = kv.eval_basis(t)?;
        for (j, &v) in vals.iter().enumerate() {
            b[(s, first + j)] = v;
        }
    }
    Ok(b)
}

/// Solves the least-squares problem along axis 0 of `data` (layout:
/// axis-0 fastest, then axis 1, then axis 2, `d` interleaved last).
/// Returns coefficients with axis-0 length replaced by `basis.ncols()`.
fn solve_mode0(
    data: &[f64],
    shape: [usize; 3],
    d: usize,
    basis: &DMatrix<f64>,
    dir: usize,
) -> Result<Vec<f64>> {
    let [m0, m1, m2] = shape;
    let n0 = basis.ncols();
    if m0 < n0 {
        return Err(SplineError::Underdetermined { dir, samples: m0, controls: n0 });
    }
    let gram = basis.transpose() * basis;
    let chol = gram
        .cholesky()
        .ok_or(SplineError::SingularFit(dir))?;

    let cols = m1 * m2 * d;
    // Gather into an (m0 x cols) matrix, solve, scatter back.
    let mut rhs = DMatrix::zeros(m0, cols);
    for k in 0..m2 {
        for j in 0..m1 {
            for i in 0..m0 {
                let at = ((k * m1 + j) * m0 + i) * d;
                for c in 0..d {
                    rhs[(i, (k * m1 + j) * d + c)] = data[at + c];
                }
            }
        }
    }
    let proj = basis.transpose() * rhs;
    let sol = chol.solve(&proj);
    let mut out = vec![0.0; n0 * m1 * m2 * d];
    for k in 0..m2 {
        for j in 0..m1 {
            for i in 0..n0 {
                let at = ((k * m1 + j) * n0 + i) * d;
                for c in 0..d {
                    out[at + c] = sol[(i, (k * m1 + j) * d + c)];
                }
            }
        }
    }
    Ok(out)
}

/// Rotates axes `(a0, a1, a2) -> (a1, a2, a0)` keeping `d` interleaved.
fn rotate_axes(data: &[f64], shape: [usize; 3], d: usize) -> Vec<f64> {
    let [m0, m1, m2] = shape;
    let mut out = vec![0.0; data.len()];
    for k in 0..m2 {
        for j in 0..m1 {
            for i in 0..m0 {
                let src = ((k * m1 + j) * m0 + i) * d;
                let dst = ((i * m2 + k) * m1 + j) * d;
                out[dst..dst + d].copy_from_slice(&data[src..src + d]);
            }
        }
    }
    out
}

fn residuals(fitted: &SplineVolume, params: [&[f64]; 3], values: &[f64], d: usize) -> FitReport {
    let (mut max_r, mut sum_sq, mut count) = (0.0f64, 0.0f64, 0usize);
    let [pu, pv, pw] = params;
    for (k, &w) in pw.iter().enumerate() {
        for (j, &v) in pv.iter().enumerate() {
            for (i, &u) in pu.iter().enumerate() {
                let f = fitted.eval(u, v, w).expect("sample params are in the fit domain");
                let at = ((k * pv.len() + j) * pu.len() + i) * d;
                let mut r2 = 0.0;
                for c in 0..d {
                    let e = f[c] - values[at + c];
                    r2 += e * e;
                }
                max_r = max_r.max(r2.sqrt());
                sum_sq += r2;
                count += 1;
            }
        }
    }
    FitReport { max_residual: max_r, rms_residual: (sum_sq / count.max(1) as f64).sqrt() }
}

/// Least-squares fit of gridded samples by a tensor-product volume with
/// the given degrees and control-grid size. Knots are uniform clamped
/// over each direction's sampled parameter range.
///
/// `values` is laid out u-fastest with `dim` interleaved, matching the
/// control point layout of [`SplineVolume`].
pub fn fit_tensor_volume(
    params: [&[f64]; 3],
    values: &[f64],
    dim: usize,
    degrees: [usize; 3],
    grid: [usize; 3],
) -> Result<(SplineVolume, FitReport)> {
    let [pu, pv, pw] = params;
    let m = [pu.len(), pv.len(), pw.len()];
    if values.len() != m[0] * m[1] * m[2] * dim {
        return Err(SplineError::ControlGridMismatch {
            expected: m[0] * m[1] * m[2] * dim,
            got: values.len(),
        });
    }
    for dir in 0..3 {
        if m[dir] < grid[dir] {
            return Err(SplineError::Underdetermined {
                dir,
                samples: m[dir],
                controls: grid[dir],
            });
        }
    }
    let kvs = [
        KnotVector::uniform(degrees[0], grid[0], pu[0], pu[m[0] - 1])?,
        KnotVector::uniform(degrees[1], grid[1], pv[0], pv[m[1] - 1])?,
        KnotVector::uniform(degrees[2], grid[2], pw[0], pw[m[2] - 1])?,
    ];
    let bases = [
        basis_matrix(&kvs[0], pu)?,
        basis_matrix(&kvs[1], pv)?,
        basis_matrix(&kvs[2], pw)?,
    ];

    let mut data = values.to_vec();
    let mut shape = m;
    for dir in 0..3 {
        data = solve_mode0(&data, shape, dim, &bases[dir], dir)?;
        shape[0] = bases[dir].ncols();
        data = rotate_axes(&data, shape, dim);
        shape = [shape[1], shape[2], shape[0]];
    }

    let [ku, kv, kw] = kvs;
    let fitted = SplineVolume::new(ku, kv, kw, dim, data, None)?;
    let report = residuals(&fitted, params, values, dim);
    Ok((fitted, report))
}

/// Tri-cubic least-squares fit of gridded samples (degree 3 each way).
pub fn fit_tricubic(
    params: [&[f64]; 3],
    values: &[f64],
    dim: usize,
    grid: [usize; 3],
) -> Result<(SplineVolume, FitReport)> {
    fit_tensor_volume(params, values, dim, [3, 3, 3], grid)
}

/// Least-squares fit of gridded surface samples in a prescribed spline
/// space (knot vectors fixed by the caller). Used by offsetting so the
/// result lives in the space of the input surface.
pub(crate) fn fit_surface_in_space(
    knots_u: &KnotVector,
    knots_v: &KnotVector,
    params_u: &[f64],
    params_v: &[f64],
    values: &[f64],
) -> Result<SplineSurface> {
    let (mu, mv) = (params_u.len(), params_v.len());
    let (nu, nv) = (knots_u.num_basis(), knots_v.num_basis());
    if mu < nu {
        return Err(SplineError::Underdetermined { dir: 0, samples: mu, controls: nu });
    }
    if mv < nv {
        return Err(SplineError::Underdetermined { dir: 1, samples: mv, controls: nv });
    }
    let bu = basis_matrix(knots_u, params_u)?;
    let bv = basis_matrix(knots_v, params_v)?;
    // Two-mode separable solve via the 3D machinery with a unit axis.
    let data = solve_mode0(values, [mu, mv, 1], 3, &bu, 0)?;
    let data = rotate_axes(&data, [nu, mv, 1], 3); // -> (mv, 1, nu)
    let data = solve_mode0(&data, [mv, 1, nu], 3, &bv, 1)?;
    let data = rotate_axes(&data, [nv, 1, nu], 3); // -> (1, nu, nv)
    SplineSurface::new(knots_u.clone(), knots_v.clone(), data, None)
}

/// Uniformly spaced parameters covering `[a, b]` inclusively.
pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sample_volume(vol: &SplineVolume, m: [usize; 3]) -> ([Vec<f64>; 3], Vec<f64>) {
        let ([u0, v0, w0], [u1, v1, w1]) = vol.domain();
        let pu = linspace(u0, u1, m[0]);
        let pv = linspace(v0, v1, m[1]);
        let pw = linspace(w0, w1, m[2]);
        let d = vol.dim();
        let mut values = Vec::with_capacity(m[0] * m[1] * m[2] * d);
        for &w in &pw {
            for &v in &pv {
                for &u in &pu {
                    values.extend(vol.eval(u, v, w).unwrap());
                }
            }
        }
        ([pu, pv, pw], values)
    }

    fn random_tricubic(seed: u64, n: usize) -> SplineVolume {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kv = KnotVector::uniform(3, n, 0.0, 1.0).unwrap();
        let mut points = Vec::new();
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    points.push(i as f64 + rng.gen_range(-0.2..0.2));
                    points.push(j as f64 + rng.gen_range(-0.2..0.2));
                    points.push(k as f64 + rng.gen_range(-0.2..0.2));
                }
            }
        }
        SplineVolume::new(kv.clone(), kv.clone(), kv, 3, points, None).unwrap()
    }

    #[test]
    fn recovers_own_samples_exactly() {
        let vol = random_tricubic(1, 5);
        let (params, values) = sample_volume(&vol, [20, 20, 20]);
        let ([pu, pv, pw], _) = (&params, ());
        let (fit, report) =
            fit_tricubic([pu, pv, pw], &values, 3, [5, 5, 5]).unwrap();
        let scale = vol.bbox_diagonal();
        assert!(
            report.max_residual < 1e-9 * scale,
            "residual {} vs scale {}",
            report.max_residual,
            scale
        );
        // Idempotence: refit of the fit reproduces the same coefficients.
        let (_, values2) = sample_volume(&fit, [20, 20, 20]);
        let (fit2, _) = fit_tricubic([pu, pv, pw], &values2, 3, [5, 5, 5]).unwrap();
        for (a, b) in fit.points().iter().zip(fit2.points()) {
            assert!((a - b).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn trilinear_is_contained_in_tricubic() {
        let vol = SplineVolume::box_map([0.0, -1.0, 2.0], [3.0, 1.0, 5.0]);
        let (params, values) = sample_volume(&vol, [8, 8, 8]);
        let ([pu, pv, pw], _) = (&params, ());
        let (_, report) = fit_tricubic([pu, pv, pw], &values, 3, [4, 4, 4]).unwrap();
        assert!(report.max_residual < 1e-11, "residual {}", report.max_residual);
    }

    #[test]
    fn refinement_reduces_residual_on_quintic() {
        // Tri-quintic content: componentwise fifth powers of coordinates.
        let n = 16usize;
        let pu = linspace(0.0, 1.0, n);
        let mut values = Vec::new();
        for &w in &pu {
            for &v in &pu {
                for &u in &pu {
                    values.extend_from_slice(&[
                        u.powi(5) + v,
                        v.powi(5) + w,
                        w.powi(5) + u * v,
                    ]);
                }
            }
        }
        let (_, coarse) = fit_tricubic([&pu, &pu, &pu], &values, 3, [8, 8, 8]).unwrap();
        let (_, fine) = fit_tricubic([&pu, &pu, &pu], &values, 3, [12, 12, 12]).unwrap();
        assert!(coarse.max_residual > 0.0);
        assert!(fine.max_residual < coarse.max_residual);
    }

    #[test]
    fn underdetermined_is_an_error() {
        let vol = SplineVolume::unit_cube();
        let (params, values) = sample_volume(&vol, [3, 8, 8]);
        let ([pu, pv, pw], _) = (&params, ());
        let err = fit_tricubic([pu, pv, pw], &values, 3, [5, 5, 5]);
        assert!(matches!(err, Err(SplineError::Underdetermined { dir: 0, .. })));
    }

    #[test]
    fn coincident_samples_make_singular_normal_equations() {
        // All-but-one sample at u = 0: interior cubic basis columns are
        // identically zero, so the normal equations lose rank.
        let mut pu = vec![0.0; 7];
        pu.push(1.0);
        let pv = linspace(0.0, 1.0, 8);
        let pw = linspace(0.0, 1.0, 8);
        let vol = SplineVolume::unit_cube();
        let mut values = Vec::new();
        for &w in &pw {
            for &v in &pv {
                for &u in &pu {
                    values.extend(vol.eval(u, v, w).unwrap());
                }
            }
        }
        let err = fit_tricubic([&pu, &pv, &pw], &values, 3, [4, 4, 4]);
        assert!(err.is_err());
    }
}
