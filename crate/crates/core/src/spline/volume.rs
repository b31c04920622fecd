//! Trivariate tensor-product splines.

use super::{KnotVector, Result, SplineError};
use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

/// A tensor-product B-spline/Bézier volume mapping `[u,v,w]` parameters
/// into `R^d` (`d = 3` for geometry, `d = 1` for scalar fields).
///
/// Control points are stored flat, row-major with `u` fastest; weights,
/// when present, make the map rational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineVolume {
    pub knots_u: KnotVector,
    pub knots_v: KnotVector,
    pub knots_w: KnotVector,
    dim: usize,
    /// `nu * nv * nw * dim` coordinates, u fastest, then v, then w.
    points: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl SplineVolume {
    pub fn new(
        knots_u: KnotVector,
        knots_v: KnotVector,
        knots_w: KnotVector,
        dim: usize,
        points: Vec<f64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = knots_u.num_basis() * knots_v.num_basis() * knots_w.num_basis();
        if points.len() != n * dim {
            return Err(SplineError::ControlGridMismatch { expected: n * dim, got: points.len() });
        }
        if let Some(w) = &weights {
            if w.len() != n || w.iter().any(|&x| !(x > 0.0)) {
                return Err(SplineError::BadWeights);
            }
        }
        Ok(Self { knots_u, knots_v, knots_w, dim, points, weights })
    }

    /// Tri-linear Bézier volume from its 8 corner points, ordered
    /// `(u,v,w)` binary with u fastest: 000,100,010,110,001,101,011,111.
    pub fn trilinear(corners: [[f64; 3]; 8]) -> Self {
        let mut points = Vec::with_capacity(24);
        for c in corners {
            points.extend_from_slice(&c);
        }
        Self::new(
            KnotVector::bezier(1),
            KnotVector::bezier(1),
            KnotVector::bezier(1),
            3,
            points,
            None,
        )
        .expect("corner grid is consistent")
    }

    /// The identity map on the unit cube.
    pub fn unit_cube() -> Self {
        Self::trilinear([
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
            [1.0, 1.0, 1.0],
        ])
    }

    /// Tri-linear map of the unit cube onto the axis-aligned box
    /// `[lo, hi]` in parameter or world space.
    pub fn box_map(lo: [f64; 3], hi: [f64; 3]) -> Self {
        let c = |mask: usize| {
            [
                if mask & 1 != 0 { hi[0] } else { lo[0] },
                if mask & 2 != 0 { hi[1] } else { lo[1] },
                if mask & 4 != 0 { hi[2] } else { lo[2] },
            ]
        };
        Self::trilinear([c(0), c(1), c(2), c(3), c(4), c(5), c(6), c(7)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid_size(&self) -> (usize, usize, usize) {
        (self.knots_u.num_basis(), self.knots_v.num_basis(), self.knots_w.num_basis())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn points_mut(&mut self) -> &mut [f64] {
        &mut self.points
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_rational(&self) -> bool {
        self.weights.is_some()
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let (nu, nv, _) = self.grid_size();
        (k * nv + j) * nu + i
    }

    /// Control point `(i, j, k)` as a slice of length `dim`.
    pub fn control(&self, i: usize, j: usize, k: usize) -> &[f64] {
        let at = self.index(i, j, k) * self.dim;
        &self.points[at..at + self.dim]
    }

    pub fn control_mut(&mut self, i: usize, j: usize, k: usize) -> &mut [f64] {
        let at = self.index(i, j, k) * self.dim;
        let d = self.dim;
        &mut self.points[at..at + d]
    }

    pub fn domain(&self) -> ([f64; 3], [f64; 3]) {
        (
            [self.knots_u.domain_start(), self.knots_v.domain_start(), self.knots_w.domain_start()],
            [self.knots_u.domain_end(), self.knots_v.domain_end(), self.knots_w.domain_end()],
        )
    }

    pub fn contains_param(&self, u: f64, v: f64, w: f64) -> bool {
        self.knots_u.contains(u) && self.knots_v.contains(v) && self.knots_w.contains(w)
    }

    /// Evaluates the map at `(u, v, w)`.
    pub fn eval(&self, u: f64, v: f64, w: f64) -> Result<Vec<f64>> {
        let (fu, bu) = self.knots_u.eval_basis(u)?;
        let (fv, bv) = self.knots_v.eval_basis(v)?;
        let (fw, bw) = self.knots_w.eval_basis(w)?;
        let d = self.dim;
        let mut acc = vec![0.0; d];
        let mut wacc = 0.0;
        for (kk, &cw) in bw.iter().enumerate() {
            for (jj, &cv) in bv.iter().enumerate() {
                let b_vw = cv * cw;
                for (ii, &cu) in bu.iter().enumerate() {
                    let mut b = cu * b_vw;
                    let idx = self.index(fu + ii, fv + jj, fw + kk);
                    if let Some(ws) = &self.weights {
                        b *= ws[idx];
                        wacc += b;
                    }
                    let p = &self.points[idx * d..idx * d + d];
                    for (a, &x) in acc.iter_mut().zip(p) {
                        *a += b * x;
                    }
                }
            }
        }
        if self.weights.is_some() {
            for a in acc.iter_mut() {
                *a /= wacc;
            }
        }
        Ok(acc)
    }

    /// Evaluates a 3D (`dim == 3`) volume as a point.
    pub fn eval_point(&self, u: f64, v: f64, w: f64) -> Result<Point3<f64>> {
        if self.dim != 3 {
            return Err(SplineError::BadDimension(self.dim, 3));
        }
        let p = self.eval(u, v, w)?;
        Ok(Point3::new(p[0], p[1], p[2]))
    }

    /// Evaluates a scalar (`dim == 1`) field.
    pub fn eval_scalar(&self, u: f64, v: f64, w: f64) -> Result<f64> {
        if self.dim != 1 {
            return Err(SplineError::BadDimension(self.dim, 1));
        }
        Ok(self.eval(u, v, w)?[0])
    }

    /// Jacobian of a 3D volume: columns are `∂/∂u`, `∂/∂v`, `∂/∂w`.
    pub fn jacobian(&self, u: f64, v: f64, w: f64) -> Result<Matrix3<f64>> {
        if self.dim != 3 {
            return Err(SplineError::BadDimension(self.dim, 3));
        }
        let (fu, du) = self.knots_u.eval_basis_derivs(u, 1)?;
        let (fv, dv) = self.knots_v.eval_basis_derivs(v, 1)?;
        let (fw, dw) = self.knots_w.eval_basis_derivs(w, 1)?;

        // Homogeneous accumulation: value and the three partials of both
        // the weighted point sum A and the weight sum W.
        let mut a = [Vector3::zeros(); 4]; // value, du, dv, dw
        let mut wsum = [0.0f64; 4];
        let rational = self.weights.is_some();
        for (kk, _) in dw[0].iter().enumerate() {
            for (jj, _) in dv[0].iter().enumerate() {
                for (ii, _) in du[0].iter().enumerate() {
                    let idx = self.index(fu + ii, fv + jj, fw + kk);
                    let wgt = self.weights.as_ref().map_or(1.0, |ws| ws[idx]);
                    let p = &self.points[idx * 3..idx * 3 + 3];
                    let pv = Vector3::new(p[0], p[1], p[2]) * wgt;
                    let b = [
                        du[0][ii] * dv[0][jj] * dw[0][kk],
                        du[1][ii] * dv[0][jj] * dw[0][kk],
                        du[0][ii] * dv[1][jj] * dw[0][kk],
                        du[0][ii] * dv[0][jj] * dw[1][kk],
                    ];
                    for m in 0..4 {
                        a[m] += b[m] * pv;
                        if rational {
                            wsum[m] += b[m] * wgt;
                        }
                    }
                }
            }
        }
        let cols = if rational {
            let s = a[0] / wsum[0];
            [
                (a[1] - s * wsum[1]) / wsum[0],
                (a[2] - s * wsum[2]) / wsum[0],
                (a[3] - s * wsum[3]) / wsum[0],
            ]
        } else {
            [a[1], a[2], a[3]]
        };
        Ok(Matrix3::from_columns(&cols))
    }

    /// Axis-aligned bounding box of the control grid (contains the
    /// image by the convex-hull property).
    pub fn control_bbox(&self) -> (Point3<f64>, Point3<f64>) {
        assert_eq!(self.dim, 3, "bbox needs a geometric volume");
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.points.chunks_exact(3) {
            for c in 0..3 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        (lo, hi)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.control_bbox();
        (hi - lo).norm()
    }

    /// Translates all control points (geometric volumes only).
    pub fn translated(&self, d: Vector3<f64>) -> Self {
        let mut out = self.clone();
        for p in out.points.chunks_exact_mut(3) {
            p[0] += d.x;
            p[1] += d.y;
            p[2] += d.z;
        }
        out
    }

    /// Applies `f` to every control point (geometric volumes only).
    pub fn map_points(&self, f: impl Fn(Point3<f64>) -> Point3<f64>) -> Self {
        let mut out = self.clone();
        for p in out.points.chunks_exact_mut(3) {
            let q = f(Point3::new(p[0], p[1], p[2]));
            p.copy_from_slice(&[q.x, q.y, q.z]);
        }
        out
    }

    /// Material volume of the mapped solid by Gauss–Legendre integration
    /// of `|det J|` over the parametric domain.
    pub fn material_volume(&self, cells_per_dir: usize) -> Result<f64> {
        let gauss: [(f64, f64); 3] = {
            let a = (3.0f64 / 5.0).sqrt();
            [(-a, 5.0 / 9.0), (0.0, 8.0 / 9.0), (a, 5.0 / 9.0)]
        };
        let ([u0, v0, w0], [u1, v1, w1]) = self.domain();
        let n = cells_per_dir.max(1);
        let (hu, hv, hw) = ((u1 - u0) / n as f64, (v1 - v0) / n as f64, (w1 - w0) / n as f64);
        let mut total = 0.0;
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    for (gu, wu) in gauss {
                        for (gv, wv) in gauss {
                            for (gw, ww) in gauss {
                                let u = u0 + hu * (i as f64 + 0.5 + 0.5 * gu);
                                let v = v0 + hv * (j as f64 + 0.5 + 0.5 * gv);
                                let w = w0 + hw * (k as f64 + 0.5 + 0.5 * gw);
                                let det = self.jacobian(u, v, w)?.determinant().abs();
                                total += det * wu * wv * ww;
                            }
                        }
                    }
                }
            }
        }
        Ok(total * hu * hv * hw / 8.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_volume(rng: &mut impl Rng, deg: usize, n: usize) -> SplineVolume {
        let kv = KnotVector::uniform(deg, n, 0.0, 1.0).unwrap();
        let total = n * n * n;
        let mut points = Vec::with_capacity(total * 3);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    // Perturbed grid keeps the map regular.
                    points.push(i as f64 / (n - 1) as f64 + rng.gen_range(-0.08..0.08));
                    points.push(j as f64 / (n - 1) as f64 + rng.gen_range(-0.08..0.08));
                    points.push(k as f64 / (n - 1) as f64 + rng.gen_range(-0.08..0.08));
                }
            }
        }
        SplineVolume::new(kv.clone(), kv.clone(), kv, 3, points, None).unwrap()
    }

    #[test]
    fn identity_cube_midpoint_and_corner() {
        let cube = SplineVolume::unit_cube();
        let mid = cube.eval_point(0.5, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(mid, Point3::new(0.5, 0.5, 0.5), epsilon = 1e-15);
        let corner = cube.eval_point(0.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(corner, Point3::new(0.0, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn tricubic_matches_naive_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vol = random_volume(&mut rng, 3, 5);
        let (nu, nv, nw) = vol.grid_size();
        for _ in 0..20 {
            let (u, v, w) = (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
            let fast = vol.eval(u, v, w).unwrap();
            // Naive full de Boor summation over every basis product.
            let full = |kv: &KnotVector, t: f64, n: usize| -> Vec<f64> {
                let (first, vals) = kv.eval_basis(t).unwrap();
                let mut out = vec![0.0; n];
                for (i, &b) in vals.iter().enumerate() {
                    out[first + i] = b;
                }
                out
            };
            let bu = full(&vol.knots_u, u, nu);
            let bv = full(&vol.knots_v, v, nv);
            let bw = full(&vol.knots_w, w, nw);
            let mut acc = [0.0; 3];
            for k in 0..nw {
                for j in 0..nv {
                    for i in 0..nu {
                        let b = bu[i] * bv[j] * bw[k];
                        let p = vol.control(i, j, k);
                        for c in 0..3 {
                            acc[c] += b * p[c];
                        }
                    }
                }
            }
            for c in 0..3 {
                assert_abs_diff_eq!(fast[c], acc[c], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn convex_hull_containment() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vol = random_volume(&mut rng, 2, 4);
        let (lo, hi) = vol.control_bbox();
        for _ in 0..200 {
            let p = vol.eval_point(rng.gen(), rng.gen(), rng.gen()).unwrap();
            for c in 0..3 {
                assert!(p[c] >= lo[c] - 1e-12 && p[c] <= hi[c] + 1e-12);
            }
        }
    }

    #[test]
    fn jacobian_identity_and_scaling() {
        let cube = SplineVolume::unit_cube();
        let j = cube.jacobian(0.3, 0.6, 0.9).unwrap();
        assert_abs_diff_eq!(j, Matrix3::identity(), epsilon = 1e-14);

        let scaled = cube.map_points(|p| Point3::new(2.0 * p.x, 2.0 * p.y, 2.0 * p.z));
        let j2 = scaled.jacobian(0.5, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(j2, Matrix3::identity() * 2.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vol = random_volume(&mut rng, 3, 6);
        let h = 1e-6;
        for _ in 0..10 {
            let (u, v, w) = (
                rng.gen_range(0.01..0.99),
                rng.gen_range(0.01..0.99),
                rng.gen_range(0.01..0.99),
            );
            let jac = vol.jacobian(u, v, w).unwrap();
            let cols = [
                (vol.eval_point(u + h, v, w).unwrap() - vol.eval_point(u - h, v, w).unwrap())
                    / (2.0 * h),
                (vol.eval_point(u, v + h, w).unwrap() - vol.eval_point(u, v - h, w).unwrap())
                    / (2.0 * h),
                (vol.eval_point(u, v, w + h).unwrap() - vol.eval_point(u, v, w - h).unwrap())
                    / (2.0 * h),
            ];
            for c in 0..3 {
                let exact = jac.column(c);
                let rel = (exact - cols[c]).norm() / exact.norm().max(1e-9);
                assert!(rel < 1e-5, "column {c}: relative error {rel}");
            }
        }
    }

    #[test]
    fn rational_weights_reproduce_circle_arc() {
        // Quarter circle as a rational quadratic in the u direction,
        // extruded linearly in v and w: radius stays 1 along the arc.
        let ku = KnotVector::bezier(2);
        let kl = KnotVector::bezier(1);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let arc = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for k in 0..2 {
            for j in 0..2 {
                for (i, p) in arc.iter().enumerate() {
                    points.extend_from_slice(&[p[0], p[1], k as f64 + j as f64]);
                    weights.push(if i == 1 { r } else { 1.0 });
                }
            }
        }
        let vol = SplineVolume::new(ku, kl.clone(), kl, 3, points, Some(weights)).unwrap();
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let p = vol.eval_point(t, 0.0, 0.0).unwrap();
            assert_abs_diff_eq!((p.x * p.x + p.y * p.y).sqrt(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn material_volume_of_box() {
        let b = SplineVolume::box_map([0.0, 0.0, 0.0], [2.0, 1.0, 0.5]);
        assert_abs_diff_eq!(b.material_volume(2).unwrap(), 1.0, epsilon = 1e-12);
    }
}
