//! Cross tile: three mutually orthogonal axis-parallel arms.
//!
//! Each arm has a square cross-section centered on a cell face; corner
//! rounding swaps the square corners for exact circular arcs (rational
//! quadratic blends), so full rounding yields the inscribed disk.

use super::{check_range, Face, PieceRole, Result, SolidPiece, StrutAxis, TileError, TileGeometry, TileKind, TileSpec};
use crate::spline::{KnotVector, SplineVolume};

const TINY: f64 = 1e-12;
const ARC_W: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A 2D control net (in section coordinates) with knots and weights,
/// extruded into prisms by [`extrude_patch`].
pub(crate) struct SectionPatch {
    pub knots_u: KnotVector,
    pub knots_v: KnotVector,
    /// `nu * nv` points, u fastest.
    pub points: Vec<[f64; 2]>,
    pub weights: Option<Vec<f64>>,
}

impl SectionPatch {
    fn bilinear(s0: f64, s1: f64, t0: f64, t1: f64) -> Self {
        Self {
            knots_u: KnotVector::bezier(1),
            knots_v: KnotVector::bezier(1),
            points: vec![[s0, t0], [s1, t0], [s0, t1], [s1, t1]],
            weights: None,
        }
    }

    /// Circular sector: apex at `c`, 90° arc of radius `rho` spanning the
    /// quadrant `(q1, q2)`; the arc is the `v = 1` edge.
    fn corner_sector(c: [f64; 2], rho: f64, q1: f64, q2: f64) -> Self {
        let a0 = [c[0] + q1 * rho, c[1]];
        let a1 = [c[0] + q1 * rho, c[1] + q2 * rho];
        let a2 = [c[0], c[1] + q2 * rho];
        Self {
            knots_u: KnotVector::bezier(2),
            knots_v: KnotVector::bezier(1),
            points: vec![c, c, c, a0, a1, a2],
            weights: Some(vec![1.0, ARC_W, 1.0, 1.0, ARC_W, 1.0]),
        }
    }
}

/// Square section of half-width `h` with corners rounded at radius
/// `rho`, decomposed into simple patches. `rho = h` is the full disk.
pub(crate) fn rounded_square_section(h: f64, rho: f64) -> Vec<SectionPatch> {
    let rho = rho.clamp(0.0, h);
    if rho <= TINY * h.max(1.0) {
        return vec![SectionPatch::bilinear(-h, h, -h, h)];
    }
    let c = h - rho;
    let mut patches = Vec::new();
    if c > TINY {
        patches.push(SectionPatch::bilinear(-c, c, -c, c));
        patches.push(SectionPatch::bilinear(c, h, -c, c));
        patches.push(SectionPatch::bilinear(-h, -c, -c, c));
        patches.push(SectionPatch::bilinear(-c, c, c, h));
        patches.push(SectionPatch::bilinear(-c, c, -h, -c));
    }
    for (q1, q2) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
        patches.push(SectionPatch::corner_sector([q1 * c, q2 * c], rho, q1, q2));
    }
    patches
}

/// Extrudes a section patch into a prism. The section lives in the two
/// axes other than `axis`, centered at the unit-cell axis line; local
/// `w` runs from `from` to `to` along `axis` (callers put the cell face
/// at `w = 1`).
pub(crate) fn extrude_patch(patch: &SectionPatch, axis: usize, from: f64, to: f64) -> SplineVolume {
    let (a1, a2) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let n = patch.points.len();
    let mut points = Vec::with_capacity(n * 2 * 3);
    let mut weights = patch.weights.as_ref().map(|_| Vec::with_capacity(n * 2));
    for coord in [from, to] {
        for (idx, p) in patch.points.iter().enumerate() {
            let mut q = [0.0f64; 3];
            q[a1] = 0.5 + p[0];
            q[a2] = 0.5 + p[1];
            q[axis] = coord;
            points.extend_from_slice(&q);
            if let (Some(ws), Some(pw)) = (&mut weights, &patch.weights) {
                ws.push(pw[idx]);
            }
        }
    }
    SplineVolume::new(
        patch.knots_u.clone(),
        patch.knots_v.clone(),
        KnotVector::bezier(1),
        3,
        points,
        weights,
    )
    .expect("prism control net is consistent")
}

/// Cross tile with one thickness per face (used by graded lattices;
/// the public generator passes a uniform thickness). Thicknesses are
/// cell fractions in (0, 0.5).
pub fn cross_tile_with_arm_thickness(spec: &TileSpec, thickness: [f64; 6]) -> Result<TileGeometry> {
    if spec.kind != TileKind::CrossAxis {
        return Err(TileError::WrongKind(spec.kind));
    }
    for t in thickness {
        check_range("arm_thickness", t, 0.0, 0.5)?;
    }
    if !(0.0..=1.0).contains(&spec.roundness) {
        return Err(TileError::ParamOutOfRange {
            name: "roundness",
            value: spec.roundness,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if !(0.0..=0.25).contains(&spec.skin_thickness) {
        return Err(TileError::ParamOutOfRange {
            name: "skin_thickness",
            value: spec.skin_thickness,
            lo: 0.0,
            hi: 0.25,
        });
    }

    let h_core = 0.5 * thickness.iter().cloned().fold(0.0, f64::max);
    let mut pieces = Vec::new();
    pieces.push(SolidPiece {
        volume: SplineVolume::box_map(
            [0.5 - h_core, 0.5 - h_core, 0.5 - h_core],
            [0.5 + h_core, 0.5 + h_core, 0.5 + h_core],
        ),
        role: PieceRole::Core,
    });

    let mut axes = Vec::new();
    for (fi, &face) in Face::ALL.iter().enumerate() {
        let t = thickness[fi];
        let h = 0.5 * t;
        let rho = spec.roundness * h;
        let axis = face.axis();
        let from = if face.is_positive() { 0.5 + h_core } else { 0.5 - h_core };
        let to = face.coordinate();
        for patch in rounded_square_section(h, rho) {
            pieces.push(SolidPiece {
                volume: extrude_patch(&patch, axis, from, to),
                role: PieceRole::Arm { face },
            });
        }
        axes.push(StrutAxis { a: [0.5, 0.5, 0.5], b: face.center(), thickness: t });
    }

    if spec.skin_thickness > 0.0 {
        for &face in &spec.attach_faces {
            pieces.push(SolidPiece { volume: skin_slab(face, spec.skin_thickness), role: PieceRole::Skin { face } });
        }
    }

    Ok(TileGeometry::Solid { pieces, axes })
}

/// Thin face-parallel slab covering the whole face.
pub(crate) fn skin_slab(face: Face, thickness: f64) -> SplineVolume {
    let mut lo = [0.0, 0.0, 0.0];
    let mut hi = [1.0, 1.0, 1.0];
    if face.is_positive() {
        lo[face.axis()] = 1.0 - thickness;
    } else {
        hi[face.axis()] = thickness;
    }
    SplineVolume::box_map(lo, hi)
}

/// Cross tile with axis-parallel arms of uniform thickness.
pub fn make_cross_tile(spec: &TileSpec) -> Result<TileGeometry> {
    let t = spec.arm_thickness;
    cross_tile_with_arm_thickness(spec, [t; 6])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::checks::face_section_area;

    #[test]
    fn sharp_cross_face_section_is_square() {
        let tile = make_cross_tile(&TileSpec::cross(0.2)).unwrap();
        // Sample the +z arm end face: axis-aligned square of side 0.2
        // centered at (0.5, 0.5, 1).
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for piece in tile.solid_pieces() {
            if piece.role != (PieceRole::Arm { face: Face::ZPos }) {
                continue;
            }
            for j in 0..=4 {
                for i in 0..=4 {
                    let p = piece
                        .volume
                        .eval_point(i as f64 / 4.0, j as f64 / 4.0, 1.0)
                        .unwrap();
                    for c in 0..3 {
                        lo[c] = lo[c].min(p[c]);
                        hi[c] = hi[c].max(p[c]);
                    }
                }
            }
        }
        assert!((lo[0] - 0.4).abs() < 1e-12 && (hi[0] - 0.6).abs() < 1e-12);
        assert!((lo[1] - 0.4).abs() < 1e-12 && (hi[1] - 0.6).abs() < 1e-12);
        assert!((lo[2] - 1.0).abs() < 1e-12 && (hi[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_rounding_gives_inscribed_disk_area() {
        let tile = make_cross_tile(&TileSpec::cross(0.2).with_roundness(1.0)).unwrap();
        let area = face_section_area(&tile, Face::ZPos, 64).unwrap();
        let expected = std::f64::consts::PI * 0.1 * 0.1;
        assert!(
            (area - expected).abs() < 3e-3 * expected,
            "area {area} vs disk {expected}"
        );
    }

    #[test]
    fn thickness_out_of_range_is_rejected() {
        assert!(make_cross_tile(&TileSpec::cross(0.6)).is_err());
        assert!(make_cross_tile(&TileSpec::cross(0.0)).is_err());
    }

    #[test]
    fn geometry_contained_in_unit_cell() {
        for r in [0.0, 0.5, 1.0] {
            let tile = make_cross_tile(&TileSpec::cross(0.22).with_roundness(r)).unwrap();
            let defect = tile.containment_defect().unwrap();
            assert!(defect <= 1e-9, "roundness {r}: containment defect {defect}");
        }
    }

    #[test]
    fn volume_monotone_in_thickness() {
        let v1 = make_cross_tile(&TileSpec::cross(0.15))
            .unwrap()
            .material_volume()
            .unwrap();
        let v2 = make_cross_tile(&TileSpec::cross(0.30))
            .unwrap()
            .material_volume()
            .unwrap();
        assert!(v2 > v1);
    }

    #[test]
    fn skin_only_on_attach_faces() {
        let spec = TileSpec::cross(0.2).with_skin(0.05, vec![Face::ZNeg]);
        let tile = make_cross_tile(&spec).unwrap();
        let skins: Vec<_> = tile
            .solid_pieces()
            .iter()
            .filter_map(|p| match p.role {
                PieceRole::Skin { face } => Some(face),
                _ => None,
            })
            .collect();
        assert_eq!(skins, vec![Face::ZNeg]);
    }
}
