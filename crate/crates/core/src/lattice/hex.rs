//! Hexahedral discretization of a mapped parametric volume.

use super::{LatticeError, Result};
use crate::spline::SplineVolume;
use nalgebra::{Matrix3, Point3};

/// Hex mesh with vertices in world coordinates. Cell corners use the
/// binary (u-fastest) ordering of [`SplineVolume::trilinear`]:
/// 000, 100, 010, 110, 001, 101, 011, 111.
#[derive(Debug, Clone)]
pub struct HexMesh {
    pub vertices: Vec<Point3<f64>>,
    pub cells: Vec<[usize; 8]>,
    pub resolution: [usize; 3],
}

impl HexMesh {
    pub fn cell_corners(&self, cell: usize) -> [Point3<f64>; 8] {
        let idx = self.cells[cell];
        std::array::from_fn(|i| self.vertices[idx[i]])
    }

    /// Jacobian of the trilinear interpolant at the cell center.
    pub fn cell_center_jacobian(corners: &[Point3<f64>; 8]) -> Matrix3<f64> {
        // At the center, each column is the mean of the 4 edge vectors
        // of that direction.
        let mut cols = [nalgebra::Vector3::zeros(); 3];
        for (m, corner) in corners.iter().enumerate() {
            let sign = |bit: usize| if m >> bit & 1 == 1 { 1.0 } else { -1.0 };
            for dir in 0..3 {
                cols[dir] += corner.coords * sign(dir) / 4.0;
            }
        }
        Matrix3::from_columns(&cols)
    }
}

/// Evaluates the macro volume on a uniform parametric grid and builds
/// hexahedral cells; errors on inverted cells.
pub fn hex_mesh(volume: &SplineVolume, resolution: [usize; 3]) -> Result<HexMesh> {
    let [nx, ny, nz] = resolution;
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(LatticeError::EmptyGrid(nx, ny, nz));
    }
    let ([u0, v0, w0], [u1, v1, w1]) = volume.domain();
    let coord = |a: f64, b: f64, n: usize, i: usize| a + (b - a) * i as f64 / n as f64;

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push(volume.eval_point(
                    coord(u0, u1, nx, i),
                    coord(v0, v1, ny, j),
                    coord(w0, w1, nz, k),
                )?);
            }
        }
    }
    let vid = |i: usize, j: usize, k: usize| (k * (ny + 1) + j) * (nx + 1) + i;

    let mut cells = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let c = [
                    vid(i, j, k),
                    vid(i + 1, j, k),
                    vid(i, j + 1, k),
                    vid(i + 1, j + 1, k),
                    vid(i, j, k + 1),
                    vid(i + 1, j, k + 1),
                    vid(i, j + 1, k + 1),
                    vid(i + 1, j + 1, k + 1),
                ];
                let corners = std::array::from_fn(|m| vertices[c[m]]);
                if HexMesh::cell_center_jacobian(&corners).determinant() <= 0.0 {
                    return Err(LatticeError::InvertedCell(i, j, k));
                }
                cells.push(c);
            }
        }
    }
    Ok(HexMesh { vertices, cells, resolution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::{blade_like_macro, BladeParams};

    #[test]
    fn identity_cube_2x2x2() {
        let mesh = hex_mesh(&SplineVolume::unit_cube(), [2, 2, 2]).unwrap();
        assert_eq!(mesh.vertices.len(), 27);
        assert_eq!(mesh.cells.len(), 8);
        // Unit sub-cubes of side 0.5.
        for c in 0..8 {
            let corners = mesh.cell_corners(c);
            let vol = HexMesh::cell_center_jacobian(&corners).determinant();
            assert!((vol - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn affine_macro_gives_congruent_cells() {
        let b = SplineVolume::box_map([0.0, 0.0, 0.0], [2.0, 3.0, 1.0]);
        let mesh = hex_mesh(&b, [4, 3, 2]).unwrap();
        let first = HexMesh::cell_center_jacobian(&mesh.cell_corners(0));
        for c in 1..mesh.cells.len() {
            let j = HexMesh::cell_center_jacobian(&mesh.cell_corners(c));
            assert!((j - first).norm() < 1e-13);
        }
    }

    #[test]
    fn vertices_equal_eval_at_grid_params() {
        let blade = blade_like_macro(&BladeParams::default());
        let mesh = hex_mesh(&blade, [5, 3, 2]).unwrap();
        let mut idx = 0;
        for k in 0..=2 {
            for j in 0..=3 {
                for i in 0..=5 {
                    let p = blade
                        .eval_point(i as f64 / 5.0, j as f64 / 3.0, k as f64 / 2.0)
                        .unwrap();
                    assert_eq!(mesh.vertices[idx], p);
                    idx += 1;
                }
            }
        }
    }

    #[test]
    fn twisted_macro_keeps_positive_determinants() {
        let blade = blade_like_macro(&BladeParams { twist_deg: 40.0, ..Default::default() });
        let mesh = hex_mesh(&blade, [8, 4, 2]).unwrap();
        for c in 0..mesh.cells.len() {
            let det = HexMesh::cell_center_jacobian(&mesh.cell_corners(c)).determinant();
            assert!(det > 0.0);
        }
    }

    #[test]
    fn inverted_cell_detected() {
        // A volume folded onto itself: swap the two u-levels of control
        // points so the map reverses orientation.
        let folded = SplineVolume::trilinear([
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ]);
        assert!(matches!(
            hex_mesh(&folded, [2, 2, 2]),
            Err(LatticeError::InvertedCell(_, _, _))
        ));
    }
}
