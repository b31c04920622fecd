//! Diagonal tile: struts along the four space diagonals, with conical
//! ends at the cube corners. Roundness > 0 blunts the cone tips with a
//! quadratic blend confined to the corner region, so the straight and
//! rounded variants coincide away from the corners. Attach faces get an
//! arm flaring to the whole face (plus optional skin).

use super::cross::skin_slab;
use super::{check_range, Face, PieceRole, Result, SolidPiece, StrutAxis, TileError, TileGeometry, TileKind, TileSpec};
use crate::spline::{KnotVector, SplineVolume};
use nalgebra::{Point3, Vector3};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Perpendicular frame of a space diagonal.
fn diagonal_frame(axis: Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let d = axis.normalize();
    let seed = if d.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = d.cross(&seed).normalize();
    let e2 = d.cross(&e1);
    (e1, e2)
}

/// Prism of constant square section along a segment of the diagonal.
fn prism_piece(
    origin: Point3<f64>,
    d: Vector3<f64>,
    e1: Vector3<f64>,
    e2: Vector3<f64>,
    s0: f64,
    s1: f64,
    h: f64,
) -> SplineVolume {
    let corner = |s: f64, a: f64, b: f64| origin + s * d + (a * h) * e1 + (b * h) * e2;
    let mut points = Vec::with_capacity(24);
    for s in [s0, s1] {
        for b in [-1.0, 1.0] {
            for a in [-1.0, 1.0] {
                let p = corner(s, a, b);
                points.extend_from_slice(&[p.x, p.y, p.z]);
            }
        }
    }
    SplineVolume::new(
        KnotVector::bezier(1),
        KnotVector::bezier(1),
        KnotVector::bezier(1),
        3,
        points,
        None,
    )
    .unwrap()
}

/// Tapered end piece: section scale and axial station are quadratic
/// Bézier functions of the length parameter (3 control levels).
fn taper_piece(
    origin: Point3<f64>,
    d: Vector3<f64>,
    e1: Vector3<f64>,
    e2: Vector3<f64>,
    stations: [f64; 3],
    scales: [f64; 3],
    h: f64,
) -> SplineVolume {
    let mut points = Vec::with_capacity(36);
    for lvl in 0..3 {
        let (s, f) = (stations[lvl], scales[lvl]);
        for b in [-1.0, 1.0] {
            for a in [-1.0, 1.0] {
                let p = origin + s * d + (a * f * h) * e1 + (b * f * h) * e2;
                points.extend_from_slice(&[p.x, p.y, p.z]);
            }
        }
    }
    SplineVolume::new(
        KnotVector::bezier(1),
        KnotVector::bezier(1),
        KnotVector::bezier(2),
        3,
        points,
        None,
    )
    .unwrap()
}

/// Flaring attachment arm: square section at the cell mid-plane growing
/// to the full face (`w = 1` on the face).
fn attach_arm(face: Face, t: f64) -> SplineVolume {
    let axis = face.axis();
    let (a1, a2) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let mut points = Vec::with_capacity(24);
    for (coord, half) in [(0.5, 0.5 * t), (face.coordinate(), 0.5)] {
        for b in [-1.0, 1.0] {
            for a in [-1.0, 1.0] {
                let mut p = [0.0f64; 3];
                p[a1] = 0.5 + a * half;
                p[a2] = 0.5 + b * half;
                p[axis] = coord;
                points.extend_from_slice(&p);
            }
        }
    }
    SplineVolume::new(
        KnotVector::bezier(1),
        KnotVector::bezier(1),
        KnotVector::bezier(1),
        3,
        points,
        None,
    )
    .unwrap()
}

/// Diagonal-arms tile.
pub fn make_diagonal_tile(spec: &TileSpec) -> Result<TileGeometry> {
    if spec.kind != TileKind::CrossDiagonal {
        return Err(TileError::WrongKind(spec.kind));
    }
    let t = spec.arm_thickness;
    check_range("arm_thickness", t, 0.0, 0.5)?;
    if !(0.0..=1.0).contains(&spec.roundness) {
        return Err(TileError::ParamOutOfRange {
            name: "roundness",
            value: spec.roundness,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let h = 0.5 * t;
    let r = spec.roundness;
    // Cone length along the diagonal; 2t keeps every tapered section
    // inside the cube with margin (worst per-coordinate excursion of a
    // square section on a space diagonal is ~1.116 h per unit scale).
    let cap = (2.0 * t).min(0.45 * SQRT3);
    let blend = (2.0 * r * t).min(cap);

    let diagonals = [
        ([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]),
        ([1.0, 0.0, 0.0], [0.0, 1.0, 1.0]),
        ([0.0, 1.0, 0.0], [1.0, 0.0, 1.0]),
        ([0.0, 0.0, 1.0], [1.0, 1.0, 0.0]),
    ];

    let mut pieces = Vec::new();
    let mut axes = Vec::new();
    for (a, b) in diagonals {
        let pa = Point3::new(a[0], a[1], a[2]);
        let pb = Point3::new(b[0], b[1], b[2]);
        let d = (pb - pa) / SQRT3;
        let (e1, e2) = diagonal_frame(pb - pa);
        let lin = |s: f64| s / cap;

        // Both ends, mirrored: stations measured from the near corner.
        for (origin, dir) in [(pa, d), (pb, -d)] {
            if blend > 0.0 {
                // Blunted tip: below the cone everywhere, tangent to it
                // at the blend boundary; differs from the sharp variant
                // only within 2·roundness·thickness of the corner.
                pieces.push(SolidPiece {
                    volume: taper_piece(
                        origin,
                        dir,
                        e1,
                        e2,
                        [0.25 * blend, 0.625 * blend, blend],
                        [0.0, lin(0.625 * blend), lin(blend)],
                        h,
                    ),
                    role: PieceRole::Core,
                });
                if blend < cap {
                    pieces.push(SolidPiece {
                        volume: taper_piece(
                            origin,
                            dir,
                            e1,
                            e2,
                            [blend, 0.5 * (blend + cap), cap],
                            [lin(blend), lin(0.5 * (blend + cap)), 1.0],
                            h,
                        ),
                        role: PieceRole::Core,
                    });
                }
            } else {
                pieces.push(SolidPiece {
                    volume: taper_piece(
                        origin,
                        dir,
                        e1,
                        e2,
                        [0.0, 0.5 * cap, cap],
                        [0.0, 0.5, 1.0],
                        h,
                    ),
                    role: PieceRole::Core,
                });
            }
        }
        pieces.push(SolidPiece {
            volume: prism_piece(pa, d, e1, e2, cap, SQRT3 - cap, h),
            role: PieceRole::Core,
        });
        axes.push(StrutAxis { a, b, thickness: t });
    }

    for &face in &spec.attach_faces {
        pieces.push(SolidPiece { volume: attach_arm(face, t), role: PieceRole::Arm { face } });
        let mut fc = face.center();
        fc[face.axis()] = 0.5;
        axes.push(StrutAxis { a: fc, b: face.center(), thickness: t });
        if spec.skin_thickness > 0.0 {
            pieces.push(SolidPiece {
                volume: skin_slab(face, spec.skin_thickness),
                role: PieceRole::Skin { face },
            });
        }
    }

    Ok(TileGeometry::Solid { pieces, axes })
}
