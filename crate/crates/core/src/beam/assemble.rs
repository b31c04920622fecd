//! DOF bookkeeping and global assembly.

use super::element::element_stiffness;
use super::{BeamError, BeamModel, Result, DOF_PER_NODE};
use std::collections::HashSet;

/// Disposition of one global DOF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofState {
    Free(usize),
    Fixed(f64),
    /// Node has no incident element; carried along with zero motion.
    Inactive,
}

/// Maps global DOFs (6 per node) to the reduced free system.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub state: Vec<DofState>,
    /// free index → global DOF, ordered for low bandwidth.
    pub free: Vec<usize>,
}

impl DofMap {
    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    /// Expands a free-system vector to full size, filling fixed values.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        self.state
            .iter()
            .map(|s| match *s {
                DofState::Free(i) => reduced[i],
                DofState::Fixed(v) => v,
                DofState::Inactive => 0.0,
            })
            .collect()
    }
}

/// Reverse Cuthill–McKee ordering of the active nodes.
fn rcm_node_order(model: &BeamModel, active: &[bool]) -> Vec<usize> {
    let n = model.nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &model.elements {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    // Start from the lowest-degree unvisited active node of each
    // component; classic BFS with degree-sorted neighbors.
    loop {
        let start = (0..n)
            .filter(|&i| active[i] && !visited[i])
            .min_by_key(|&i| adj[i].len());
        let Some(start) = start else { break };
        let mut queue = std::collections::VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> =
                adj[u].iter().cloned().filter(|&v| active[v] && !visited[v]).collect();
            next.sort_by_key(|&v| adj[v].len());
            for v in next {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// Builds the DOF map: clamped nodes and prescribed DOFs become fixed,
/// isolated nodes inactive, the rest ordered by RCM.
pub fn build_dof_map(model: &BeamModel) -> DofMap {
    let n = model.nodes.len();
    let mut incident = vec![false; n];
    for e in &model.elements {
        incident[e.a] = true;
        incident[e.b] = true;
    }
    let clamped: HashSet<usize> = model.constraints.clamped_nodes.iter().cloned().collect();
    let mut state = vec![DofState::Inactive; n * DOF_PER_NODE];
    for node in 0..n {
        for c in 0..DOF_PER_NODE {
            let dof = node * DOF_PER_NODE + c;
            state[dof] = if !incident[node] {
                DofState::Inactive
            } else if clamped.contains(&node) {
                DofState::Fixed(0.0)
            } else {
                DofState::Free(usize::MAX) // placeholder
            };
        }
    }
    for &(dof, value) in &model.constraints.prescribed {
        if state[dof] != DofState::Inactive {
            state[dof] = DofState::Fixed(value);
        }
    }

    let order = rcm_node_order(model, &incident);
    let mut free = Vec::new();
    for node in order {
        for c in 0..DOF_PER_NODE {
            let dof = node * DOF_PER_NODE + c;
            if matches!(state[dof], DofState::Free(_)) {
                state[dof] = DofState::Free(free.len());
                free.push(dof);
            }
        }
    }
    DofMap { state, free }
}

/// Checks that every connected component of the element graph touches
/// at least one fixed DOF.
pub fn check_grounded(model: &BeamModel, dofs: &DofMap) -> Result<()> {
    let n = model.nodes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for e in &model.elements {
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut grounded: HashSet<usize> = HashSet::new();
    for node in 0..n {
        let fixed = (0..DOF_PER_NODE).any(|c| {
            matches!(dofs.state[node * DOF_PER_NODE + c], DofState::Fixed(_))
        });
        if fixed {
            let r = find(&mut parent, node);
            grounded.insert(r);
        }
    }
    let mut incident = vec![false; n];
    for e in &model.elements {
        incident[e.a] = true;
        incident[e.b] = true;
    }
    for node in 0..n {
        if incident[node] && !grounded.contains(&find(&mut parent, node)) {
            let root = find(&mut parent, node);
            let members: Vec<usize> = (0..n)
                .filter(|&m| incident[m] && find(&mut parent, m) == root)
                .take(8)
                .collect();
            return Err(BeamError::FloatingComponent(members));
        }
    }
    Ok(())
}

/// Dense symmetric assembly of the full stiffness (all DOFs); test and
/// small-model utility.
pub fn assemble_stiffness(model: &BeamModel) -> Result<nalgebra::DMatrix<f64>> {
    let n = model.dof_count();
    let mut k = nalgebra::DMatrix::zeros(n, n);
    for idx in 0..model.elements.len() {
        let ke = element_stiffness(model, idx)?;
        let el = &model.elements[idx];
        let map: Vec<usize> = (0..6)
            .map(|c| el.a * DOF_PER_NODE + c)
            .chain((0..6).map(|c| el.b * DOF_PER_NODE + c))
            .collect();
        for (i, &gi) in map.iter().enumerate() {
            for (j, &gj) in map.iter().enumerate() {
                k[(gi, gj)] += ke[(i, j)];
            }
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{BeamElement, Constraints, Material, ShearModel};
    use nalgebra::Point3;

    fn chain_model(n: usize) -> BeamModel {
        let material = Material::inconel_718();
        let nodes = (0..=n).map(|i| Point3::new(i as f64 * 0.1, 0.0, 0.0)).collect();
        let elements = (0..n)
            .map(|i| BeamElement { a: i, b: i + 1, radius: 0.005, material })
            .collect();
        BeamModel { nodes, elements, constraints: Constraints::default(), shear: ShearModel::Timoshenko }
    }

    #[test]
    fn dof_map_counts() {
        let mut m = chain_model(4);
        m.constraints.clamped_nodes.push(0);
        let dofs = build_dof_map(&m);
        assert_eq!(dofs.free_count(), 4 * 6);
    }

    #[test]
    fn floating_component_detected() {
        let mut m = chain_model(2);
        // A second, unconnected strut.
        let base = m.nodes.len();
        m.nodes.push(Point3::new(0.0, 1.0, 0.0));
        m.nodes.push(Point3::new(0.1, 1.0, 0.0));
        m.elements.push(BeamElement {
            a: base,
            b: base + 1,
            radius: 0.005,
            material: Material::inconel_718(),
        });
        m.constraints.clamped_nodes.push(0);
        let dofs = build_dof_map(&m);
        match check_grounded(&m, &dofs) {
            Err(BeamError::FloatingComponent(nodes)) => {
                assert!(nodes.contains(&base));
            }
            other => panic!("expected floating component, got {other:?}"),
        }
    }

    #[test]
    fn global_stiffness_is_symmetric() {
        let m = chain_model(3);
        let k = assemble_stiffness(&m).unwrap();
        assert!((&k - k.transpose()).norm() < 1e-8 * k.norm());
    }
}
