//! Interface-compatibility and printability checks.

use super::{BeamGraph, Face, PieceRole, Result, TileError, TileGeometry};
use nalgebra::Vector3;

/// Per-face result of the interface check.
#[derive(Debug, Clone, Copy)]
pub struct FaceCheck {
    pub face: Face,
    /// Whether any arm meets this face.
    pub touched: bool,
    /// Distance of the arm section's area centroid from the face center.
    pub centroid_error: f64,
    /// Angle between the arm axis and the face normal, radians.
    pub angle_error_rad: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct InterfaceReport {
    pub faces: Vec<FaceCheck>,
}

impl InterfaceReport {
    /// All faces touched by arms pass their tolerances.
    pub fn all_pass(&self) -> bool {
        self.faces.iter().all(|f| !f.touched || f.pass)
    }

    pub fn face(&self, face: Face) -> &FaceCheck {
        self.faces.iter().find(|f| f.face == face).expect("all six faces reported")
    }
}

const POSITION_TOL: f64 = 1e-6;
const ANGLE_TOL: f64 = 1e-6;
const SECTION_SAMPLES: usize = 24;

/// Area of the arm cross-section lying on `face`, by dense sampling of
/// the pieces' end surfaces (`w = 1`).
pub fn face_section_area(tile: &TileGeometry, face: Face, n: usize) -> Result<f64> {
    let (area, _, _) = section_integrals(tile, face, n)?;
    Ok(area)
}

/// Returns `(area, centroid, mean axis direction)` of the arm section
/// on `face`, integrating over every arm piece attached to it.
fn section_integrals(
    tile: &TileGeometry,
    face: Face,
    n: usize,
) -> Result<(f64, Vector3<f64>, Vector3<f64>)> {
    let mut area = 0.0;
    let mut centroid = Vector3::zeros();
    let mut axis = Vector3::zeros();
    for piece in tile.solid_pieces() {
        if piece.role != (PieceRole::Arm { face }) {
            continue;
        }
        let vol = &piece.volume;
        let ([u0, v0, _], [u1, v1, w1]) = vol.domain();
        for j in 0..n {
            for i in 0..n {
                let u = u0 + (u1 - u0) * (i as f64 + 0.5) / n as f64;
                let v = v0 + (v1 - v0) * (j as f64 + 0.5) / n as f64;
                let jac = vol.jacobian(u, v, w1)?;
                let su = jac.column(0) * (u1 - u0) / n as f64;
                let sv = jac.column(1) * (v1 - v0) / n as f64;
                let da = su.cross(&sv).norm();
                let p = vol.eval_point(u, v, w1)?;
                area += da;
                centroid += da * p.coords;
                let t = jac.column(2);
                let tn = t.norm();
                if tn > 0.0 {
                    axis += da * (t / tn);
                }
            }
        }
    }
    if area > 0.0 {
        centroid /= area;
    }
    Ok((area, centroid, axis))
}

/// Checks that each face-touching arm meets its face centered and at a
/// right angle (the construction rule that makes composed neighbors
/// join smoothly).
pub fn check_interface_compatibility(tile: &TileGeometry) -> Result<InterfaceReport> {
    let mut faces = Vec::with_capacity(6);
    for face in Face::ALL {
        let (area, centroid, axis) = section_integrals(tile, face, SECTION_SAMPLES)?;
        if area <= 0.0 {
            faces.push(FaceCheck {
                face,
                touched: false,
                centroid_error: 0.0,
                angle_error_rad: 0.0,
                pass: true,
            });
            continue;
        }
        let fc = face.center();
        let centroid_error =
            (centroid - Vector3::new(fc[0], fc[1], fc[2])).norm();
        let nrm = face.normal();
        let normal = Vector3::new(nrm[0], nrm[1], nrm[2]);
        let axis = axis.normalize();
        // Arm axes may be parameterized toward or away from the face.
        let cosang = axis.dot(&normal).abs().clamp(0.0, 1.0);
        let angle_error_rad = cosang.acos();
        faces.push(FaceCheck {
            face,
            touched: true,
            centroid_error,
            angle_error_rad,
            pass: centroid_error <= POSITION_TOL && angle_error_rad <= ANGLE_TOL,
        });
    }
    Ok(InterfaceReport { faces })
}

/// One edge steeper than the growth threshold.
#[derive(Debug, Clone, Copy)]
pub struct EdgeViolation {
    pub edge: usize,
    pub angle_deg: f64,
}

/// Printability report: angle violations plus nodes with no support
/// path below them (hanging features also fail a powder-bed build).
#[derive(Debug, Clone)]
pub struct PrintabilityReport {
    pub max_angle_deg: f64,
    pub violations: Vec<EdgeViolation>,
    pub unsupported_nodes: Vec<usize>,
}

impl PrintabilityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty() && self.unsupported_nodes.is_empty()
    }
}

/// Checks every strut angle against the growth direction (folded to
/// [0°, 90°], boundary inclusive) and flags nodes that neither rest on
/// the build plane nor have a downward edge within the angle limit.
pub fn check_printability(
    graph: &BeamGraph,
    growth: Vector3<f64>,
    max_angle_deg: f64,
) -> Result<PrintabilityReport> {
    let glen = growth.norm();
    if glen == 0.0 {
        return Err(TileError::ZeroGrowthVector);
    }
    if !(max_angle_deg > 0.0 && max_angle_deg <= 90.0) {
        return Err(TileError::ParamOutOfRange {
            name: "max_angle_deg",
            value: max_angle_deg,
            lo: 0.0,
            hi: 90.0,
        });
    }
    let g = growth / glen;
    let nodes = graph.nodes();
    let heights: Vec<f64> = nodes.iter().map(|p| p.coords.dot(&g)).collect();
    let span = heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - heights.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * span.max(1.0);
    let plate = heights.iter().cloned().fold(f64::INFINITY, f64::min);

    const ANGLE_SLACK: f64 = 1e-9;
    let mut violations = Vec::new();
    let mut angle = vec![0.0f64; graph.edge_count()];
    for (idx, e) in graph.edges().iter().enumerate() {
        let d = nodes[e.b] - nodes[e.a];
        let cos = (d.dot(&g) / d.norm()).abs().clamp(0.0, 1.0);
        let a = cos.acos().to_degrees();
        angle[idx] = a;
        if a > max_angle_deg + ANGLE_SLACK {
            violations.push(EdgeViolation { edge: idx, angle_deg: a });
        }
    }

    let mut supported: Vec<bool> = heights.iter().map(|&h| h <= plate + tol).collect();
    for (idx, e) in graph.edges().iter().enumerate() {
        if angle[idx] > max_angle_deg + ANGLE_SLACK {
            continue;
        }
        let (ha, hb) = (heights[e.a], heights[e.b]);
        if hb < ha - tol {
            supported[e.a] = true;
        }
        if ha < hb - tol {
            supported[e.b] = true;
        }
    }
    let unsupported_nodes =
        (0..nodes.len()).filter(|&i| !supported[i]).collect();

    Ok(PrintabilityReport { max_angle_deg, violations, unsupported_nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::{make_cross_tile, TileSpec};
    use nalgebra::{Point3, Vector3};

    #[test]
    fn cross_tile_passes_on_all_six_faces() {
        let tile = make_cross_tile(&TileSpec::cross(0.2)).unwrap();
        let report = check_interface_compatibility(&tile).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.faces.iter().filter(|f| f.touched).count(), 6);
    }

    #[test]
    fn translated_tile_fails_with_measured_offset() {
        let tile = make_cross_tile(&TileSpec::cross(0.2)).unwrap();
        let shifted = match tile {
            TileGeometry::Solid { pieces, axes } => TileGeometry::Solid {
                pieces: pieces
                    .into_iter()
                    .map(|p| super::super::SolidPiece {
                        volume: p.volume.translated(Vector3::new(0.05, 0.0, 0.0)),
                        role: p.role,
                    })
                    .collect(),
                axes,
            },
            beam => beam,
        };
        let report = check_interface_compatibility(&shifted).unwrap();
        assert!(!report.all_pass());
        let z = report.face(Face::ZPos);
        assert!((z.centroid_error - 0.05).abs() < 1e-9, "err {}", z.centroid_error);
    }

    #[test]
    fn rounded_cross_still_passes() {
        let tile = make_cross_tile(&TileSpec::cross(0.2).with_roundness(0.7)).unwrap();
        let report = check_interface_compatibility(&tile).unwrap();
        assert!(report.all_pass());
    }

    fn two_node_graph(dir: Vector3<f64>) -> BeamGraph {
        let mut g = BeamGraph::new();
        let a = g.add_node(Point3::origin());
        let b = g.add_node(Point3::origin() + dir);
        g.add_edge(a, b, 1e-4);
        g
    }

    #[test]
    fn vertical_edge_passes() {
        let g = two_node_graph(Vector3::z());
        let r = check_printability(&g, Vector3::z(), 60.0).unwrap();
        assert!(r.pass());
    }

    #[test]
    fn constructed_61_degree_edge_is_flagged() {
        let a = 61f64.to_radians();
        let g = two_node_graph(Vector3::new(a.sin(), 0.0, a.cos()));
        let r = check_printability(&g, Vector3::z(), 60.0).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert!((r.violations[0].angle_deg - 61.0).abs() < 0.01);
    }

    #[test]
    fn horizontal_edge_passes_at_inclusive_90() {
        let g = two_node_graph(Vector3::x());
        let r = check_printability(&g, Vector3::z(), 90.0).unwrap();
        assert!(r.pass());
    }

    #[test]
    fn zero_growth_is_an_error() {
        let g = two_node_graph(Vector3::z());
        assert!(check_printability(&g, Vector3::zeros(), 60.0).is_err());
    }
}
