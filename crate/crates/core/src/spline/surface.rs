//! Bivariate tensor-product splines (boundary shells and offsets).

use super::{KnotVector, Result, SplineError};
use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

/// A tensor-product spline surface in `R^3`, optionally rational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineSurface {
    pub knots_u: KnotVector,
    pub knots_v: KnotVector,
    /// `nu * nv * 3` coordinates, u fastest.
    points: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl SplineSurface {
    pub fn new(
        knots_u: KnotVector,
        knots_v: KnotVector,
        points: Vec<f64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = knots_u.num_basis() * knots_v.num_basis();
        if points.len() != n * 3 {
            return Err(SplineError::ControlGridMismatch { expected: n * 3, got: points.len() });
        }
        if let Some(w) = &weights {
            if w.len() != n || w.iter().any(|&x| !(x > 0.0)) {
                return Err(SplineError::BadWeights);
            }
        }
        Ok(Self { knots_u, knots_v, points, weights })
    }

    /// Bilinear patch from 4 corners (u fastest: 00, 10, 01, 11).
    pub fn bilinear(corners: [[f64; 3]; 4]) -> Self {
        let mut points = Vec::with_capacity(12);
        for c in corners {
            points.extend_from_slice(&c);
        }
        Self::new(KnotVector::bezier(1), KnotVector::bezier(1), points, None).unwrap()
    }

    pub fn grid_size(&self) -> (usize, usize) {
        (self.knots_u.num_basis(), self.knots_v.num_basis())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (nu, _) = self.grid_size();
        j * nu + i
    }

    pub fn control(&self, i: usize, j: usize) -> Point3<f64> {
        let at = self.index(i, j) * 3;
        Point3::new(self.points[at], self.points[at + 1], self.points[at + 2])
    }

    pub fn domain(&self) -> ([f64; 2], [f64; 2]) {
        (
            [self.knots_u.domain_start(), self.knots_v.domain_start()],
            [self.knots_u.domain_end(), self.knots_v.domain_end()],
        )
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<Point3<f64>> {
        let (fu, bu) = self.knots_u.eval_basis(u)?;
        let (fv, bv) = self.knots_v.eval_basis(v)?;
        let mut acc = Vector3::zeros();
        let mut wacc = 0.0;
        for (jj, &cv) in bv.iter().enumerate() {
            for (ii, &cu) in bu.iter().enumerate() {
                let idx = self.index(fu + ii, fv + jj);
                let mut b = cu * cv;
                if let Some(ws) = &self.weights {
                    b *= ws[idx];
                    wacc += b;
                }
                let p = &self.points[idx * 3..idx * 3 + 3];
                acc += b * Vector3::new(p[0], p[1], p[2]);
            }
        }
        if self.weights.is_some() {
            acc /= wacc;
        }
        Ok(Point3::from(acc))
    }

    /// First partial derivatives `(∂S/∂u, ∂S/∂v)`.
    pub fn partials(&self, u: f64, v: f64) -> Result<(Vector3<f64>, Vector3<f64>)> {
        let (fu, du) = self.knots_u.eval_basis_derivs(u, 1)?;
        let (fv, dv) = self.knots_v.eval_basis_derivs(v, 1)?;
        let mut a = [Vector3::zeros(); 3]; // value, du, dv
        let mut wsum = [0.0f64; 3];
        let rational = self.weights.is_some();
        for jj in 0..dv[0].len() {
            for ii in 0..du[0].len() {
                let idx = self.index(fu + ii, fv + jj);
                let wgt = self.weights.as_ref().map_or(1.0, |ws| ws[idx]);
                let p = &self.points[idx * 3..idx * 3 + 3];
                let pv = Vector3::new(p[0], p[1], p[2]) * wgt;
                let b = [du[0][ii] * dv[0][jj], du[1][ii] * dv[0][jj], du[0][ii] * dv[1][jj]];
                for m in 0..3 {
                    a[m] += b[m] * pv;
                    if rational {
                        wsum[m] += b[m] * wgt;
                    }
                }
            }
        }
        if rational {
            let s = a[0] / wsum[0];
            Ok(((a[1] - s * wsum[1]) / wsum[0], (a[2] - s * wsum[2]) / wsum[0]))
        } else {
            Ok((a[1], a[2]))
        }
    }

    /// Unit normal `(S_u × S_v)/|S_u × S_v|`; errors when the cross
    /// product nearly vanishes (degenerate parameterization).
    pub fn unit_normal(&self, u: f64, v: f64) -> Result<Vector3<f64>> {
        let (su, sv) = self.partials(u, v)?;
        let n = su.cross(&sv);
        let len = n.norm();
        let scale = su.norm().max(sv.norm()).max(1e-300);
        if len <= 1e-10 * scale * scale {
            return Err(SplineError::DegenerateNormal { u, v });
        }
        Ok(n / len)
    }

    pub fn control_bbox(&self) -> (Point3<f64>, Point3<f64>) {
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
}
