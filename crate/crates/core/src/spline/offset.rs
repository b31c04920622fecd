//! Offset-surface approximation by normal displacement and refitting.
//!
//! The exact offset of a polynomial spline is not polynomial, so the
//! surface is sampled, displaced along unit normals, and refit in the
//! input's own spline space. Self-intersection of large offsets is not
//! detected.

use super::fit::{fit_surface_in_space, linspace};
use super::{Result, SplineError, SplineSurface};

#[derive(Debug, Clone, Copy)]
pub struct OffsetOptions {
    /// Samples per direction = factor × control count (at least 4).
    pub sample_factor: usize,
    /// Validation grid per direction.
    pub validation: [usize; 2],
}

impl Default for OffsetOptions {
    fn default() -> Self {
        Self { sample_factor: 4, validation: [23, 23] }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OffsetReport {
    /// Max |fitted(u,v) - (S + d·n)(u,v)| over the validation grid.
    pub max_deviation: f64,
}

/// Approximates the offset of `surf` at the given distance along its
/// unit normals. Distance 0 reproduces the surface; negative distances
/// are rejected (flip the orientation instead).
pub fn approximate_offset(surf: &SplineSurface, distance: f64) -> Result<(SplineSurface, OffsetReport)> {
    approximate_offset_with(surf, distance, &OffsetOptions::default())
}

pub fn approximate_offset_with(
    surf: &SplineSurface,
    distance: f64,
    opts: &OffsetOptions,
) -> Result<(SplineSurface, OffsetReport)> {
    if distance < 0.0 {
        return Err(SplineError::NegativeDistance(distance));
    }
    let (nu, nv) = surf.grid_size();
    let ([u0, v0], [u1, v1]) = surf.domain();
    let mu = (nu * opts.sample_factor.max(1)).max(nu + 1).max(4);
    let mv = (nv * opts.sample_factor.max(1)).max(nv + 1).max(4);
    let pu = linspace(u0, u1, mu);
    let pv = linspace(v0, v1, mv);

    let mut values = Vec::with_capacity(mu * mv * 3);
    for &v in &pv {
        for &u in &pu {
            let p = surf.eval(u, v)?;
            let n = surf.unit_normal(u, v)?;
            let q = p + distance * n;
            values.extend_from_slice(&[q.x, q.y, q.z]);
        }
    }
    let fitted = fit_surface_in_space(&surf.knots_u, &surf.knots_v, &pu, &pv, &values)?;

    let mut max_dev = 0.0f64;
    for &v in &linspace(v0, v1, opts.validation[1]) {
        for &u in &linspace(u0, u1, opts.validation[0]) {
            let exact = surf.eval(u, v)? + distance * surf.unit_normal(u, v)?;
            let dev = (fitted.eval(u, v)? - exact).norm();
            max_dev = max_dev.max(dev);
        }
    }
    Ok((fitted, OffsetReport { max_deviation: max_dev }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::fit::basis_matrix;
    use crate::spline::KnotVector;
    use nalgebra::DMatrix;

    #[test]
    fn planar_patch_translates() {
        let s = SplineSurface::bilinear([
            [0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.0, 3.0, 0.0],
            [2.0, 3.0, 0.0],
        ]);
        let (off, report) = approximate_offset(&s, 1.0).unwrap();
        assert!(report.max_deviation < 1e-9);
        let p = off.eval(0.3, 0.8).unwrap();
        assert!((p.z - 1.0).abs() < 1e-9);
        assert!((p.x - 0.6).abs() < 1e-9 && (p.y - 2.4).abs() < 1e-9);
    }

    #[test]
    fn zero_distance_reproduces_input() {
        let s = SplineSurface::bilinear([
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.5],
            [0.0, 1.0, 0.2],
            [1.0, 1.0, 0.9],
        ]);
        let (off, report) = approximate_offset(&s, 0.0).unwrap();
        assert!(report.max_deviation < 1e-10);
        for (a, b) in s.points().iter().zip(off.points()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn negative_distance_rejected() {
        let s = SplineSurface::bilinear([
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
        ]);
        assert!(matches!(
            approximate_offset(&s, -0.5),
            Err(SplineError::NegativeDistance(_))
        ));
    }

    /// Bicubic least-squares approximation of a sphere cap of the given
    /// radius, as a graph patch over `[-e, e]^2`.
    fn sphere_cap(radius: f64, extent: f64, n: usize) -> SplineSurface {
        let m = 4 * n;
        let pu = linspace(-extent, extent, m);
        let mut values = Vec::new();
        for &y in &pu {
            for &x in &pu {
                let z = (radius * radius - x * x - y * y).sqrt();
                values.extend_from_slice(&[x, y, z]);
            }
        }
        let ku = KnotVector::uniform(3, n, -extent, extent).unwrap();
        let kv = ku.clone();
        fit_surface_in_space(&ku, &kv, &pu, &pu, &values).unwrap()
    }

    #[test]
    fn sphere_offset_grows_the_radius() {
        // Radius-2 cap offset by 0.5 (outward normals point away from the
        // center for a +z graph patch) must land on the radius-2.5 sphere.
        let s = sphere_cap(2.0, 0.8, 10);
        let (off, report) = approximate_offset(&s, 0.5).unwrap();
        let mut worst = 0.0f64;
        for &v in &linspace(-0.75, 0.75, 9) {
            for &u in &linspace(-0.75, 0.75, 9) {
                let p = off.eval(u, v).unwrap();
                let r = (p.x * p.x + p.y * p.y + p.z * p.z).sqrt();
                worst = worst.max((r - 2.5).abs());
            }
        }
        // Input fit error + offset fit error bound the radius defect.
        assert!(worst < 2e-3, "radius defect {} (report {})", worst, report.max_deviation);
    }

    #[test]
    fn degenerate_normal_propagates() {
        let s = SplineSurface::bilinear([
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
        ]);
        assert!(matches!(
            approximate_offset(&s, 0.1),
            Err(SplineError::DegenerateNormal { .. })
        ));
    }

    #[test]
    fn basis_matrix_rows_sum_to_one() {
        let kv = KnotVector::uniform(3, 7, 0.0, 1.0).unwrap();
        let b: DMatrix<f64> = basis_matrix(&kv, &linspace(0.0, 1.0, 15)).unwrap();
        for r in 0..b.nrows() {
            let sum: f64 = b.row(r).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }
}
