//! As-built inspection: signed deviation of a measured point cloud
//! against the nominal tessellated surface, with histogram reporting.
//!
//! Inputs are assumed pre-aligned; a rigid pre-transform can be applied
//! to the measured cloud before calling [`deviation`]. Sign convention:
//! positive = outside the nominal surface (material excess).

mod bvh;
mod mesh;

pub use bvh::TriangleBvh;
pub use mesh::{sample_on_mesh, tessellate_lattice, tessellate_surface, tessellate_volume_boundary, TriMesh};

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum InspectError {
    #[error("empty {0}")]
    Empty(&'static str),

    #[error("sampling density must be positive")]
    BadDensity,

    #[error("tolerance band must be positive")]
    BadBand,

    #[error("histogram needs at least one bin")]
    NoBins,
}

pub type Result<T> = std::result::Result<T, InspectError>;

/// Measured (or synthetic) surface points, optionally with normals.
#[derive(Debug, Clone, Default)]
pub struct PointCloud {
    pub points: Vec<Point3<f64>>,
    pub normals: Option<Vec<Vector3<f64>>>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Applies a rigid transform (rotation then translation).
    pub fn transformed(&self, rot: &nalgebra::Rotation3<f64>, t: Vector3<f64>) -> Self {
        Self {
            points: self.points.iter().map(|p| rot * p + t).collect(),
            normals: self.normals.as_ref().map(|ns| ns.iter().map(|n| rot * n).collect()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    /// `bins + 1` edges, uniform over `[-max|d|, +max|d|]`.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Signed distances of measured points to the nominal mesh plus
/// summary statistics.
#[derive(Debug, Clone, Serialize)]
pub struct DeviationReport {
    pub distances: Vec<f64>,
    pub histogram: Histogram,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub rms: f64,
    pub degenerate_triangles_skipped: usize,
}

pub const DEFAULT_BINS: usize = 64;

/// Computes per-point signed distances (exact nearest-triangle queries
/// through a bounding-volume hierarchy; sign from the nearest facet's
/// normal) and bins them into a symmetric histogram.
pub fn deviation(measured: &PointCloud, nominal: &TriMesh, bins: usize) -> Result<DeviationReport> {
    if measured.is_empty() {
        return Err(InspectError::Empty("measured point cloud"));
    }
    if nominal.triangles.is_empty() {
        return Err(InspectError::Empty("nominal mesh"));
    }
    if bins == 0 {
        return Err(InspectError::NoBins);
    }
    let bvh = TriangleBvh::build(nominal);
    let distances: Vec<f64> = measured
        .points
        .par_iter()
        .map(|p| bvh.signed_distance(p))
        .collect();

    let max_abs = distances.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let span = if max_abs > 0.0 { max_abs } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &d in &distances {
        let t = (d + span) / (2.0 * span);
        let b = ((t * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let edges: Vec<f64> = (0..=bins)
        .map(|i| -span + 2.0 * span * i as f64 / bins as f64)
        .collect();

    let n = distances.len() as f64;
    let min = distances.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = distances.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = distances.iter().sum::<f64>() / n;
    let rms = (distances.iter().map(|d| d * d).sum::<f64>() / n).sqrt();

    Ok(DeviationReport {
        distances,
        histogram: Histogram { edges, counts },
        min,
        max,
        mean,
        rms,
        degenerate_triangles_skipped: bvh.degenerate_skipped(),
    })
}

/// Accept/reject against a symmetric tolerance band.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub fraction_inside: f64,
    pub band: f64,
    pub required_fraction: f64,
}

pub fn tolerance_verdict(report: &DeviationReport, band: f64, required_fraction: f64) -> Result<Verdict> {
    if !(band > 0.0) {
        return Err(InspectError::BadBand);
    }
    let inside = report.distances.iter().filter(|d| d.abs() <= band).count();
    let fraction_inside = inside as f64 / report.distances.len() as f64;
    Ok(Verdict {
        pass: fraction_inside >= required_fraction,
        fraction_inside,
        band,
        required_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn cube_mesh() -> TriMesh {
        tessellate_volume_boundary(&crate::spline::SplineVolume::unit_cube(), [4, 4, 4]).unwrap()
    }

    #[test]
    fn nominal_samples_have_zero_deviation() {
        let mesh = cube_mesh();
        let cloud = sample_on_mesh(&mesh, 20.0, 7).unwrap();
        let report = deviation(&cloud, &mesh, DEFAULT_BINS).unwrap();
        assert!(report.max.abs() < 1e-12 && report.min.abs() < 1e-12);
        let verdict = tolerance_verdict(&report, 1e-6, 0.95).unwrap();
        assert!(verdict.pass && (verdict.fraction_inside - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_normal_offset_is_recovered() {
        let mesh = cube_mesh();
        let mut cloud = sample_on_mesh(&mesh, 15.0, 3).unwrap();
        let normals = cloud.normals.clone().unwrap();
        for (p, n) in cloud.points.iter_mut().zip(&normals) {
            *p += 0.1 * n;
        }
        let report = deviation(&cloud, &mesh, DEFAULT_BINS).unwrap();
        // All deviations +0.1 (points near cube edges see the adjacent
        // face at the same distance, sign still positive).
        assert!((report.mean - 0.1).abs() < 5e-3, "mean {}", report.mean);
        assert!(report.min > 0.0);
        assert!(report.max < 0.1 + 1e-9);
    }

    #[test]
    fn random_perturbation_bounds() {
        let mesh = cube_mesh();
        let mut cloud = sample_on_mesh(&mesh, 15.0, 11).unwrap();
        let normals = cloud.normals.clone().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = 0.02;
        for (p, n) in cloud.points.iter_mut().zip(&normals) {
            *p += rng.gen_range(-a..a) * n;
        }
        let report = deviation(&cloud, &mesh, DEFAULT_BINS).unwrap();
        assert!(report.max <= a + 1e-12 && report.min >= -a - 1e-12);
        // Mean ~ 0 within 3σ of the sample mean.
        let sigma = a / 3.0f64.sqrt() / (cloud.len() as f64).sqrt();
        assert!(report.mean.abs() < 3.0 * sigma + 1e-4, "mean {}", report.mean);
        let s: usize = report.histogram.counts.iter().sum();
        assert_eq!(s, cloud.len());
    }

    #[test]
    fn rigid_motion_equivariance() {
        let mesh = cube_mesh();
        let mut cloud = sample_on_mesh(&mesh, 10.0, 5).unwrap();
        let normals = cloud.normals.clone().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (p, n) in cloud.points.iter_mut().zip(&normals) {
            *p += rng.gen_range(-0.05..0.05) * n;
        }
        let base = deviation(&cloud, &mesh, DEFAULT_BINS).unwrap();

        let rot = Rotation3::from_euler_angles(0.4, -0.8, 1.3);
        let t = Vector3::new(3.0, -2.0, 0.7);
        let cloud2 = cloud.transformed(&rot, t);
        let mesh2 = mesh.transformed(&rot, t);
        let moved = deviation(&cloud2, &mesh2, DEFAULT_BINS).unwrap();
        for (a, b) in base.distances.iter().zip(&moved.distances) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn histogram_invariant_under_permutation() {
        let mesh = cube_mesh();
        let mut cloud = sample_on_mesh(&mesh, 12.0, 9).unwrap();
        let normals = cloud.normals.clone().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (p, n) in cloud.points.iter_mut().zip(&normals) {
            *p += rng.gen_range(-0.01..0.01) * n;
        }
        let a = deviation(&cloud, &mesh, 32).unwrap();
        let mut perm: Vec<usize> = (0..cloud.len()).collect();
        perm.shuffle(&mut rng);
        let shuffled = PointCloud {
            points: perm.iter().map(|&i| cloud.points[i]).collect(),
            normals: None,
        };
        let b = deviation(&shuffled, &mesh, 32).unwrap();
        assert_eq!(a.histogram.counts, b.histogram.counts);
    }

    #[test]
    fn constructed_fraction_fails_threshold() {
        let mesh = cube_mesh();
        let base = sample_on_mesh(&mesh, 14.0, 13).unwrap();
        let normals = base.normals.clone().unwrap();
        let n = base.len();
        let mut points = base.points.clone();
        // Exactly 10% of points pushed far outside the band.
        let far = n / 10;
        for i in 0..far {
            points[i] += 1.0 * normals[i];
        }
        let cloud = PointCloud { points, normals: None };
        let report = deviation(&cloud, &mesh, DEFAULT_BINS).unwrap();
        let verdict = tolerance_verdict(&report, 0.5, 0.95).unwrap();
        assert!(!verdict.pass);
        let expected = 1.0 - far as f64 / n as f64;
        assert!((verdict.fraction_inside - expected).abs() < 1e-12);
    }

    #[test]
    fn all_outside_band_fails_at_zero() {
        let mesh = cube_mesh();
        let mut cloud = sample_on_mesh(&mesh, 10.0, 1).unwrap();
        let normals = cloud.normals.clone().unwrap();
        for (p, n) in cloud.points.iter_mut().zip(&normals) {
            *p += 1.0 * n;
        }
        let report = deviation(&cloud, &mesh, DEFAULT_BINS).unwrap();
        let verdict = tolerance_verdict(&report, 0.5, 0.95).unwrap();
        assert!(!verdict.pass);
        assert_eq!(verdict.fraction_inside, 0.0);
    }
}
