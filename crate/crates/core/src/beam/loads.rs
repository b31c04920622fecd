//! Centrifugal loading: each element contributes its mass times ω²r at
//! its midpoint, directed radially away from the rotation axis, lumped
//! half to each end node.

use super::assemble::{build_dof_map, DofState};
use super::{BeamModel, LoadCase, Result, DOF_PER_NODE};

/// Assembles the global centrifugal force vector (6 entries per node;
/// rotational DOFs stay zero). Constrained DOFs are zeroed after
/// assembly. An element midpoint on the axis simply contributes no
/// force.
pub fn centrifugal_load(model: &BeamModel, lc: &LoadCase) -> Result<Vec<f64>> {
    let mut f = vec![0.0; model.dof_count()];
    if lc.omega == 0.0 {
        return Ok(f);
    }
    let w2 = lc.omega * lc.omega;
    for e in &model.elements {
        let (pa, pb) = (model.nodes[e.a], model.nodes[e.b]);
        let length = (pb - pa).norm();
        let mass = e.material.density * std::f64::consts::PI * e.radius * e.radius * length;
        let mid = nalgebra::center(&pa, &pb);
        let rel = mid - lc.axis_point;
        let radial = rel - rel.dot(&lc.axis_dir) * lc.axis_dir;
        let force = mass * w2 * radial; // |F| = m ω² r, radially outward
        for (node, share) in [(e.a, 0.5), (e.b, 0.5)] {
            for c in 0..3 {
                f[node * DOF_PER_NODE + c] += share * force[c];
            }
        }
    }
    // Zero entries on constrained DOFs.
    let dofs = build_dof_map(model);
    for (g, s) in dofs.state.iter().enumerate() {
        if matches!(s, DofState::Fixed(_)) {
            f[g] = 0.0;
        }
    }
    Ok(f)
}
