//! Re-entrant double-V auxetic beam cell.
//!
//! Four wing nodes hang below the top face; from each wing a deep and a
//! shallow V strut run to two apex nodes on the cell axis. The nested
//! V pair is the re-entrant mechanism: under stretch the shallow apex
//! rises faster than the deep one, so the apex gap works against the
//! axis chain and couples lateral to axial motion with negative sign.
//!
//! The apexes hang unless `include_vertical_strut` joins them through a
//! central node and ties the chain to the top/bottom face centers,
//! which also provides the vertical binding between stacked cells. The
//! chain is kept exactly on the cell axis so the node set stays mirror
//! symmetric; the central node still gives the strut its bending
//! compliance, which is what preserves the auxetic mechanism.

use super::{check_range, BeamGraph, Result, TileError, TileGeometry, TileKind, TileSpec};
use nalgebra::Point3;

/// Fixed proportions of the cell (fractions of the unit cell height).
const WING_DROP: f64 = 0.2;
const DEEP_DROP_MAX: f64 = 0.6;
const WING_RADIUS_MAX: f64 = 0.45;
const SHALLOW_RATIO: f64 = 0.55;

/// Builds the double-V cell in `[0,1]^3` with growth direction +z.
pub fn make_auxetic_cell(spec: &TileSpec) -> Result<TileGeometry> {
    if spec.kind != TileKind::AuxeticDoubleV {
        return Err(TileError::WrongKind(spec.kind));
    }
    check_range("reentrant_angle_deg", spec.reentrant_angle_deg, 0.0, 90.0)?;
    if !(spec.strut_radius > 0.0) {
        return Err(TileError::ParamOutOfRange {
            name: "strut_radius",
            value: spec.strut_radius,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let tan_theta = spec.reentrant_angle_deg.to_radians().tan();
    let deep_drop = DEEP_DROP_MAX.min(WING_RADIUS_MAX * tan_theta);
    let wing_r = deep_drop / tan_theta;
    let shallow_drop = SHALLOW_RATIO * deep_drop;
    let z_wing = 1.0 - WING_DROP;
    let r = spec.strut_radius;

    let mut g = BeamGraph::new();
    // Top-edge midpoints: the lateral binding nodes.
    let e = [
        g.add_node(Point3::new(0.5, 0.0, 1.0)),
        g.add_node(Point3::new(1.0, 0.5, 1.0)),
        g.add_node(Point3::new(0.5, 1.0, 1.0)),
        g.add_node(Point3::new(0.0, 0.5, 1.0)),
    ];
    // Wings, one per side, inset so the deep V meets the reentrant angle.
    let w = [
        g.add_node(Point3::new(0.5, 0.5 - wing_r, z_wing)),
        g.add_node(Point3::new(0.5 + wing_r, 0.5, z_wing)),
        g.add_node(Point3::new(0.5, 0.5 + wing_r, z_wing)),
        g.add_node(Point3::new(0.5 - wing_r, 0.5, z_wing)),
    ];
    let apex_shallow = g.add_node(Point3::new(0.5, 0.5, z_wing - shallow_drop));
    let apex_deep = g.add_node(Point3::new(0.5, 0.5, z_wing - deep_drop));
    let top = g.add_node(Point3::new(0.5, 0.5, 1.0));
    let bottom = g.add_node(Point3::new(0.5, 0.5, 0.0));

    for i in 0..4 {
        g.add_edge(e[i], w[i], r);
        g.add_edge(w[i], apex_deep, r);
        g.add_edge(w[i], apex_shallow, r);
    }
    g.add_edge(top, apex_shallow, r);

    if spec.include_vertical_strut {
        let mid = g.add_node(Point3::new(0.5, 0.5, z_wing - 0.5 * (deep_drop + shallow_drop)));
        g.add_edge(apex_shallow, mid, r);
        g.add_edge(mid, apex_deep, r);
        g.add_edge(apex_deep, bottom, r);
    }

    g.validate()?;
    Ok(TileGeometry::Beam(g))
}
