//! Effective Poisson ratio of a beam-lattice patch under a kinematic
//! axial stretch: lateral faces free, rigid-body motion pinned by
//! minimal point constraints.

use super::{solve_static, BeamError, BeamModel, Constraints, Material, Result, ShearModel, DOF_PER_NODE};
use crate::tile::BeamGraph;

#[derive(Debug, Clone, Copy)]
pub struct PoissonOptions {
    /// Stretch axis (0 = x, 1 = y, 2 = z). The auxetic cell couples the
    /// stacking axis (z) to both lateral directions.
    pub axis: usize,
    /// Face-membership tolerance as a fraction of the patch extent.
    pub face_tol: f64,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        Self { axis: 2, face_tol: 1e-6 }
    }
}

/// Applies `strain` along the chosen axis by prescribing the axial
/// displacement of the two end faces (±strain·L/2), solves, and returns
/// `ν_eff = −(mean lateral strain)/(axial strain)` averaged over both
/// lateral directions, measured from boundary-node displacement means.
pub fn effective_poisson(
    graph: &BeamGraph,
    material: Material,
    strain: f64,
    opts: &PoissonOptions,
) -> Result<f64> {
    if strain == 0.0 {
        return Err(BeamError::ZeroStrain);
    }
    let axis = opts.axis.min(2);
    let mut model = BeamModel::from_graph(graph, material)?;
    model.shear = ShearModel::Timoshenko;
    model.validate()?;

    let nodes = &model.nodes;
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in nodes {
        for c in 0..3 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    let size: [f64; 3] = std::array::from_fn(|c| hi[c] - lo[c]);
    let tol: [f64; 3] = std::array::from_fn(|c| opts.face_tol * size[c].max(1e-12));

    let on_face = |p: &nalgebra::Point3<f64>, c: usize, high: bool| {
        if high {
            p[c] >= hi[c] - tol[c]
        } else {
            p[c] <= lo[c] + tol[c]
        }
    };

    // Prescribe the axial DOF on the two end faces.
    let mut constraints = Constraints::default();
    let half = 0.5 * strain * size[axis];
    let mut face_lo_nodes = Vec::new();
    for (i, p) in nodes.iter().enumerate() {
        if on_face(p, axis, false) {
            constraints.prescribed.push((i * DOF_PER_NODE + axis, -half));
            face_lo_nodes.push(i);
        } else if on_face(p, axis, true) {
            constraints.prescribed.push((i * DOF_PER_NODE + axis, half));
        }
    }
    if face_lo_nodes.is_empty() {
        return Err(BeamError::BadLoadCase("no nodes on the stretch faces".into()));
    }

    // Pin rigid modes: lateral translations at one node, plus rotation
    // about the stretch axis at a second node offset in l1.
    let (l1, l2) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let center: [f64; 3] = std::array::from_fn(|c| 0.5 * (lo[c] + hi[c]));
    let anchor = *face_lo_nodes
        .iter()
        .min_by(|&&a, &&b| {
            let da = (nodes[a][l1] - center[l1]).hypot(nodes[a][l2] - center[l2]);
            let db = (nodes[b][l1] - center[l1]).hypot(nodes[b][l2] - center[l2]);
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    constraints.prescribed.push((anchor * DOF_PER_NODE + l1, 0.0));
    constraints.prescribed.push((anchor * DOF_PER_NODE + l2, 0.0));
    let spinner = *face_lo_nodes
        .iter()
        .max_by(|&&a, &&b| {
            let da = (nodes[a][l1] - nodes[anchor][l1]).abs();
            let db = (nodes[b][l1] - nodes[anchor][l1]).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    if (nodes[spinner][l1] - nodes[anchor][l1]).abs() > tol[l1] {
        constraints.prescribed.push((spinner * DOF_PER_NODE + l2, 0.0));
    }
    model.constraints = constraints;

    let result = solve_static(&model, &vec![0.0; model.dof_count()])?;

    // Mean lateral displacement difference across each lateral face pair.
    let mut nu_sum = 0.0;
    for lat in [l1, l2] {
        let mut mean = [0.0f64; 2];
        let mut count = [0usize; 2];
        for (i, p) in nodes.iter().enumerate() {
            for (side, high) in [(0usize, false), (1usize, true)] {
                if on_face(p, lat, high) {
                    mean[side] += result.displacements[i][lat];
                    count[side] += 1;
                }
            }
        }
        if count[0] == 0 || count[1] == 0 {
            return Err(BeamError::BadLoadCase("no nodes on a lateral face".into()));
        }
        let lateral_strain =
            (mean[1] / count[1] as f64 - mean[0] / count[0] as f64) / size[lat];
        nu_sum += -lateral_strain / strain;
    }
    Ok(0.5 * nu_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, BuildOptions};
    use crate::spline::SplineVolume;
    use crate::tile::{orthogonal_lattice_graph, TileSpec};

    fn auxetic_patch(n: usize) -> BeamGraph {
        let cell = 0.01;
        let s = cell * n as f64;
        let lattice = build_lattice(
            &SplineVolume::box_map([0.0; 3], [s, s, s]),
            [n, n, n],
            &TileSpec::auxetic(4e-4),
            None,
            &BuildOptions::default(),
        )
        .unwrap();
        lattice.beam_graph.unwrap()
    }

    #[test]
    fn double_v_patch_is_auxetic() {
        let graph = auxetic_patch(3);
        let nu = effective_poisson(
            &graph,
            Material::inconel_718(),
            0.01,
            &PoissonOptions::default(),
        )
        .unwrap();
        assert!(nu < 0.0, "expected auxetic response, got ν_eff = {nu}");
    }

    #[test]
    fn orthogonal_grid_is_not_auxetic() {
        let graph = orthogonal_lattice_graph(3, 0.01, 4e-4);
        let nu = effective_poisson(
            &graph,
            Material::inconel_718(),
            0.01,
            &PoissonOptions::default(),
        )
        .unwrap();
        assert!(nu.abs() < 0.05, "orthogonal lattice ν_eff = {nu}");
    }

    #[test]
    fn zero_strain_is_an_error() {
        let graph = orthogonal_lattice_graph(2, 0.01, 4e-4);
        assert!(matches!(
            effective_poisson(&graph, Material::inconel_718(), 0.0, &PoissonOptions::default()),
            Err(BeamError::ZeroStrain)
        ));
    }
}
