//! Triangle meshes: tessellation of spline geometry and surface
//! sampling.

use super::{InspectError, PointCloud, Result};
use crate::lattice::LatticeModel;
use crate::spline::{SplineSurface, SplineVolume};
use nalgebra::{Point3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Default)]
pub struct TriMesh {
    pub vertices: Vec<Point3<f64>>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn triangle_points(&self, t: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Facet normal scaled by twice the triangle area.
    pub fn facet_normal_raw(&self, t: usize) -> Vector3<f64> {
        let [a, b, c] = self.triangle_points(t);
        (b - a).cross(&(c - a))
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * self.facet_normal_raw(t).norm()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn append(&mut self, other: &TriMesh) {
        let base = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles
            .extend(other.triangles.iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
    }

    pub fn transformed(&self, rot: &Rotation3<f64>, t: Vector3<f64>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| rot * p + t).collect(),
            triangles: self.triangles.clone(),
        }
    }
}

/// Tessellates a spline surface into a `nu × nv` quad grid split into
/// triangles, wound so facet normals follow `S_u × S_v`.
pub fn tessellate_surface(surf: &SplineSurface, nu: usize, nv: usize) -> Result<TriMesh> {
    if nu == 0 || nv == 0 {
        return Err(InspectError::Empty("tessellation grid"));
    }
    let ([u0, v0], [u1, v1]) = surf.domain();
    let mut mesh = TriMesh::default();
    for j in 0..=nv {
        for i in 0..=nu {
            let u = u0 + (u1 - u0) * i as f64 / nu as f64;
            let v = v0 + (v1 - v0) * j as f64 / nv as f64;
            mesh.vertices.push(surf.eval(u, v).expect("grid params in domain"));
        }
    }
    let vid = |i: usize, j: usize| j * (nu + 1) + i;
    for j in 0..nv {
        for i in 0..nu {
            let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            mesh.triangles.push([a, b, c]);
            mesh.triangles.push([a, c, d]);
        }
    }
    Ok(mesh)
}

/// Tessellates the six boundary faces of a volume, wound outward (for a
/// positively oriented volume).
pub fn tessellate_volume_boundary(vol: &SplineVolume, res: [usize; 3]) -> Result<TriMesh> {
    let ([u0, v0, w0], [u1, v1, w1]) = vol.domain();
    let lerp = |a: f64, b: f64, n: usize, i: usize| a + (b - a) * i as f64 / n as f64;
    let mut mesh = TriMesh::default();

    // (fixed axis, at_end, grid axes)
    for (axis, at_end) in [(0, false), (0, true), (1, false), (1, true), (2, false), (2, true)] {
        let (ga, gb) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (na, nb) = (res[ga], res[gb]);
        let base = mesh.vertices.len();
        for jb in 0..=nb {
            for ia in 0..=na {
                let mut p = [0.0f64; 3];
                p[axis] = if at_end {
                    [u1, v1, w1][axis]
                } else {
                    [u0, v0, w0][axis]
                };
                p[ga] = lerp([u0, v0, w0][ga], [u1, v1, w1][ga], na, ia);
                p[gb] = lerp([u0, v0, w0][gb], [u1, v1, w1][gb], nb, jb);
                mesh.vertices.push(vol.eval_point(p[0], p[1], p[2]).expect("in domain"));
            }
        }
        let vid = |i: usize, j: usize| base + j * (na + 1) + i;
        // Outward orientation: ga × gb follows the axis for even
        // permutations; flip when the face normal must point -axis.
        let flip = {
            let even = (axis + 1) % 3 == ga; // (0:(1,2)), (1:(0,2)) is odd, (2:(0,1)) even
            let outward_positive = at_end;
            (even == outward_positive) == false
        };
        for j in 0..nb {
            for i in 0..na {
                let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                if flip {
                    mesh.triangles.push([a, c, b]);
                    mesh.triangles.push([a, d, c]);
                } else {
                    mesh.triangles.push([a, b, c]);
                    mesh.triangles.push([a, c, d]);
                }
            }
        }
    }
    Ok(mesh)
}

/// Tessellates every solid piece boundary of a lattice (the nominal
/// surface for inspection and OBJ export).
pub fn tessellate_lattice(lattice: &LatticeModel, res: [usize; 3]) -> Result<TriMesh> {
    let mut mesh = TriMesh::default();
    for cell in &lattice.cells {
        for (vol, _) in &cell.pieces {
            mesh.append(&tessellate_volume_boundary(vol, res)?);
        }
    }
    if mesh.triangles.is_empty() {
        return Err(InspectError::Empty("lattice tessellation"));
    }
    Ok(mesh)
}

/// Uniform area-weighted surface sampling: the expected count is
/// `total_area × density²` (density is per unit length).
pub fn sample_on_mesh(mesh: &TriMesh, density: f64, seed: u64) -> Result<PointCloud> {
    if !(density > 0.0) {
        return Err(InspectError::BadDensity);
    }
    if mesh.triangles.is_empty() {
        return Err(InspectError::Empty("mesh"));
    }
    let mut cumulative = Vec::with_capacity(mesh.triangles.len());
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        total += mesh.triangle_area(t);
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(InspectError::Empty("mesh area"));
    }
    let count = (total * density * density).round().max(1.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(count);
    for _ in 0..count {
        let pick = rng.gen_range(0.0..total);
        let t = cumulative.partition_point(|&c| c < pick).min(mesh.triangles.len() - 1);
        let [a, b, c] = mesh.triangle_points(t);
        let (mut s, mut u) = (rng.gen::<f64>(), rng.gen::<f64>());
        if s + u > 1.0 {
            s = 1.0 - s;
            u = 1.0 - u;
        }
        points.push(a + s * (b - a) + u * (c - a));
        let n = mesh.facet_normal_raw(t);
        normals.push(if n.norm() > 0.0 { n.normalize() } else { Vector3::z() });
    }
    Ok(PointCloud { points, normals: Some(normals) })
}
