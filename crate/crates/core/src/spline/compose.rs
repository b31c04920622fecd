//! Functional composition `macro ∘ tile` approximated as a tri-cubic.
//!
//! Exact composition blows the degree up, so the composed map is sampled
//! densely and refitted; the achieved pointwise deviation is validated
//! at off-grid parameters and reported.

use super::fit::{fit_tricubic, linspace, FitReport};
use super::{Result, SplineError, SplineVolume};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct ComposeOptions {
    /// Control grid of the tri-cubic result, per direction.
    pub target_grid: [usize; 3],
    /// Sample grid = `sample_factor` × target grid per direction.
    pub sample_factor: usize,
    /// Max allowed deviation at validation parameters. `None` uses
    /// 1e-3 × the macro bounding-box diagonal.
    pub tolerance: Option<f64>,
    /// Number of random validation parameters (plus a deterministic
    /// off-grid sweep).
    pub validation_samples: usize,
    pub seed: u64,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        Self {
            target_grid: [6, 6, 6],
            sample_factor: 4,
            tolerance: None,
            validation_samples: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CompositionReport {
    pub fit: FitReport,
    /// Max |fit - macro(tile(.))| over the validation parameters.
    pub max_deviation: f64,
    pub tolerance: f64,
}

fn eval_composed(
    outer: &SplineVolume,
    tile: &SplineVolume,
    u: f64,
    v: f64,
    w: f64,
) -> Result<Vec<f64>> {
    let q = tile.eval(u, v, w)?;
    if !outer.contains_param(q[0], q[1], q[2]) {
        return Err(SplineError::TileEscapesDomain { u: q[0], v: q[1], w: q[2] });
    }
    outer.eval(q[0], q[1], q[2])
}

/// Tri-cubic approximation of `outer ∘ tile` with default options.
///
/// The tile must map its own domain into the outer volume's parametric
/// domain.
pub fn compose(outer: &SplineVolume, tile: &SplineVolume) -> Result<(SplineVolume, CompositionReport)> {
    compose_with(outer, tile, &ComposeOptions::default())
}

pub fn compose_with(
    outer: &SplineVolume,
    tile: &SplineVolume,
    opts: &ComposeOptions,
) -> Result<(SplineVolume, CompositionReport)> {
    if tile.dim() != 3 {
        return Err(SplineError::BadDimension(tile.dim(), 3));
    }
    let tolerance = opts.tolerance.unwrap_or_else(|| {
        let diag = if outer.dim() == 3 { outer.bbox_diagonal() } else { 1.0 };
        1e-3 * diag
    });

    let ([u0, v0, w0], [u1, v1, w1]) = tile.domain();
    let m: Vec<usize> = opts
        .target_grid
        .iter()
        .map(|&n| (n * opts.sample_factor.max(1)).max(n + 1))
        .collect();
    let pu = linspace(u0, u1, m[0]);
    let pv = linspace(v0, v1, m[1]);
    let pw = linspace(w0, w1, m[2]);

    let d = outer.dim();
    let mut values = Vec::with_capacity(m[0] * m[1] * m[2] * d);
    for &w in &pw {
        for &v in &pv {
            for &u in &pu {
                values.extend(eval_composed(outer, tile, u, v, w)?);
            }
        }
    }
    let (fitted, fit) = fit_tricubic([&pu, &pv, &pw], &values, d, opts.target_grid)?;

    // Validation: deterministic off-grid sweep plus seeded random draws.
    let mut max_dev = 0.0f64;
    let mut check = |u: f64, v: f64, w: f64| -> Result<()> {
        let exact = eval_composed(outer, tile, u, v, w)?;
        let approx = fitted.eval(u, v, w)?;
        let dev: f64 = exact
            .iter()
            .zip(&approx)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        max_dev = max_dev.max(dev);
        Ok(())
    };
    let off = |a: f64, b: f64, n: usize| linspace(a, b, n + 1).windows(2).map(|s| 0.5 * (s[0] + s[1])).collect::<Vec<_>>();
    for &w in &off(w0, w1, 7) {
        for &v in &off(v0, v1, 7) {
            for &u in &off(u0, u1, 7) {
                check(u, v, w)?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.validation_samples {
        check(
            rng.gen_range(u0..u1),
            rng.gen_range(v0..v1),
            rng.gen_range(w0..w1),
        )?;
    }

    if max_dev > tolerance {
        return Err(SplineError::ToleranceUnmet { tolerance, achieved: max_dev });
    }
    Ok((fitted, CompositionReport { fit, max_deviation: max_dev, tolerance }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::shapes::twisted_box_macro;
    use nalgebra::Point3;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_tile_reproduces_macro() {
        let outer = twisted_box_macro(1.0, 0.35);
        let tile = SplineVolume::unit_cube();
        let (composed, report) = compose(&outer, &tile).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (u, v, w) = (rng.gen(), rng.gen(), rng.gen());
            let a = outer.eval_point(u, v, w).unwrap();
            let b = composed.eval_point(u, v, w).unwrap();
            assert!((a - b).norm() <= report.tolerance);
        }
    }

    #[test]
    fn affine_macro_is_composed_exactly() {
        let outer = SplineVolume::box_map([1.0, 2.0, 3.0], [3.0, 5.0, 4.0]);
        let tile = SplineVolume::box_map([0.2, 0.3, 0.4], [0.8, 0.6, 0.9]);
        let (composed, report) = compose(&outer, &tile).unwrap();
        assert!(report.max_deviation < 1e-10, "deviation {}", report.max_deviation);
        let p = composed.eval_point(0.37, 0.81, 0.13).unwrap();
        let q = tile.eval_point(0.37, 0.81, 0.13).unwrap();
        let exact = outer.eval_point(q.x, q.y, q.z).unwrap();
        assert!((p - exact).norm() < 1e-10);
    }

    #[test]
    fn dense_pointwise_oracle_on_random_params() {
        let outer = twisted_box_macro(2.0, 0.5);
        let tile = SplineVolume::box_map([0.1, 0.1, 0.1], [0.6, 0.5, 0.9]);
        let (composed, report) = compose(&outer, &tile).unwrap();
        // 20^3 off-grid params checked directly against pointwise composition.
        let n = 20;
        let mut max_dev = 0.0f64;
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let u = (i as f64 + 0.37) / n as f64;
                    let v = (j as f64 + 0.61) / n as f64;
                    let w = (k as f64 + 0.13) / n as f64;
                    let q = tile.eval_point(u, v, w).unwrap();
                    let exact = outer.eval_point(q.x, q.y, q.z).unwrap();
                    let approx = composed.eval_point(u, v, w).unwrap();
                    max_dev = max_dev.max((exact - approx).norm());
                }
            }
        }
        assert!(max_dev <= report.tolerance, "dev {} tol {}", max_dev, report.tolerance);
    }

    #[test]
    fn escaping_tile_is_a_domain_error() {
        let outer = SplineVolume::unit_cube();
        let tile = SplineVolume::box_map([0.5, 0.5, 0.5], [1.5, 1.0, 1.0]);
        assert!(matches!(
            compose(&outer, &tile),
            Err(SplineError::TileEscapesDomain { .. })
        ));
    }

    #[test]
    fn unreachable_tolerance_reports_achieved_deviation() {
        let outer = twisted_box_macro(1.0, 0.8);
        let tile = SplineVolume::unit_cube();
        let opts = ComposeOptions {
            tolerance: Some(1e-18),
            target_grid: [4, 4, 4],
            ..Default::default()
        };
        match compose_with(&outer, &tile, &opts) {
            Err(SplineError::ToleranceUnmet { achieved, .. }) => assert!(achieved > 1e-18),
            other => panic!("expected tolerance error, got {other:?}"),
        }
    }

    #[test]
    fn composed_points_stay_in_macro_hull() {
        let outer = twisted_box_macro(1.0, 0.3);
        let tile = SplineVolume::box_map([0.0, 0.0, 0.0], [1.0, 1.0, 0.5]);
        let (composed, _) = compose(&outer, &tile).unwrap();
        let (lo, hi) = outer.control_bbox();
        let pad = 1e-6 * outer.bbox_diagonal();
        for k in 0..5 {
            for j in 0..5 {
                for i in 0..5 {
                    let p = composed
                        .eval_point(i as f64 / 4.0, j as f64 / 4.0, k as f64 / 4.0)
                        .unwrap();
                    for c in 0..3 {
                        assert!(p[c] > lo[c] - pad && p[c] < hi[c] + pad);
                    }
                }
            }
        }
        let _ = Point3::new(0.0, 0.0, 0.0);
    }
}
