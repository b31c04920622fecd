//! Affine (trilinear) embedding of beam cells into hex cells, and
//! graph welding.

use super::{LatticeError, Result};
use crate::lattice::hex::HexMesh;
use crate::tile::{BeamGraph, GraphEdge};
use nalgebra::Point3;
use std::collections::HashMap;

/// Maps a unit-cell beam graph into a hex cell by the trilinear
/// interpolant of the 8 corners (binary u-fastest ordering); strut
/// radii are unchanged.
pub fn embed_beam_cell(corners: &[Point3<f64>; 8], cell_graph: &BeamGraph) -> Result<BeamGraph> {
    if HexMesh::cell_center_jacobian(corners).determinant().abs() < 1e-300 {
        return Err(LatticeError::DegenerateCell);
    }
    Ok(cell_graph.mapped(|p| trilinear(corners, p.x, p.y, p.z)))
}

pub(crate) fn trilinear(corners: &[Point3<f64>; 8], u: f64, v: f64, w: f64) -> Point3<f64> {
    let mut acc = nalgebra::Vector3::zeros();
    for (m, c) in corners.iter().enumerate() {
        let fu = if m & 1 == 1 { u } else { 1.0 - u };
        let fv = if m & 2 == 2 { v } else { 1.0 - v };
        let fw = if m & 4 == 4 { w } else { 1.0 - w };
        acc += fu * fv * fw * c.coords;
    }
    Point3::from(acc)
}

/// Result summary of a weld pass.
#[derive(Debug, Clone, Copy, Default)]
pub struct MergeReport {
    pub nodes_in: usize,
    pub nodes_out: usize,
    pub edges_in: usize,
    pub edges_out: usize,
    pub duplicate_edges_collapsed: usize,
    pub zero_length_edges_dropped: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Welds a set of graphs: nodes closer than `weld_tolerance` merge into
/// their cluster centroid, duplicate edges collapse keeping the largest
/// radius, and edges that become zero-length are dropped (reported).
///
/// The output is canonically ordered (nodes sorted lexicographically),
/// so the result does not depend on the input order.
pub fn merge_graphs(graphs: &[BeamGraph], weld_tolerance: f64) -> Result<(BeamGraph, MergeReport)> {
    if weld_tolerance < 0.0 {
        return Err(LatticeError::NegativeWeldTolerance(weld_tolerance));
    }
    let mut points: Vec<Point3<f64>> = Vec::new();
    let mut edges: Vec<GraphEdge> = Vec::new();
    for g in graphs {
        let base = points.len();
        points.extend_from_slice(g.nodes());
        edges.extend(
            g.edges()
                .iter()
                .map(|e| GraphEdge { a: e.a + base, b: e.b + base, radius: e.radius }),
        );
    }
    let n = points.len();
    let mut report = MergeReport {
        nodes_in: n,
        edges_in: edges.len(),
        ..Default::default()
    };

    // Cluster nearby nodes: hash on a grid of the weld tolerance and
    // union across the 27 neighboring bins.
    let mut uf = UnionFind::new(n);
    if weld_tolerance == 0.0 {
        let mut seen: HashMap<[u64; 3], usize> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            let key = [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()];
            match seen.entry(key) {
                std::collections::hash_map::Entry::Occupied(e) => uf.union(*e.get(), i),
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(i);
                }
            }
        }
    } else {
        let cell = weld_tolerance;
        let key_of = |p: &Point3<f64>| {
            [
                (p.x / cell).floor() as i64,
                (p.y / cell).floor() as i64,
                (p.z / cell).floor() as i64,
            ]
        };
        let mut bins: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            bins.entry(key_of(p)).or_default().push(i);
        }
        for (i, p) in points.iter().enumerate() {
            let k = key_of(p);
            for dz in -1..=1 {
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        if let Some(cand) = bins.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                            for &j in cand {
                                if j > i && (points[j] - p).norm() <= weld_tolerance {
                                    uf.union(i, j);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // Cluster centroids.
    let mut cluster_of = vec![0usize; n];
    let mut clusters: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let root = uf.find(i);
        cluster_of[i] = root;
        clusters.entry(root).or_default().push(i);
    }
    let mut centroid: HashMap<usize, Point3<f64>> = HashMap::new();
    for (&root, members) in &clusters {
        let mut acc = nalgebra::Vector3::zeros();
        for &m in members {
            acc += points[m].coords;
        }
        centroid.insert(root, Point3::from(acc / members.len() as f64));
    }

    // Canonical node order: lexicographic by coordinates.
    let mut roots: Vec<usize> = clusters.keys().cloned().collect();
    roots.sort_by(|&a, &b| {
        let (pa, pb) = (centroid[&a], centroid[&b]);
        pa.x.partial_cmp(&pb.x)
            .unwrap()
            .then(pa.y.partial_cmp(&pb.y).unwrap())
            .then(pa.z.partial_cmp(&pb.z).unwrap())
    });
    let new_index: HashMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();

    let mut out = BeamGraph::new();
    for &r in &roots {
        out.add_node(centroid[&r]);
    }

    // Deduplicate edges on (min, max) node pairs keeping max radius.
    let mut best: HashMap<(usize, usize), f64> = HashMap::new();
    for e in &edges {
        let a = new_index[&cluster_of[e.a]];
        let b = new_index[&cluster_of[e.b]];
        if a == b {
            report.zero_length_edges_dropped += 1;
            continue;
        }
        let key = (a.min(b), a.max(b));
        let entry = best.entry(key).or_insert(0.0);
        if *entry > 0.0 {
            report.duplicate_edges_collapsed += 1;
        }
        *entry = entry.max(e.radius);
    }
    let mut keys: Vec<(usize, usize)> = best.keys().cloned().collect();
    keys.sort_unstable();
    for (a, b) in keys {
        out.add_edge(a, b, best[&(a, b)]);
    }

    report.nodes_out = out.node_count();
    report.edges_out = out.edge_count();
    out.validate()?;
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::{make_auxetic_cell, TileGeometry, TileSpec};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn unit_corners() -> [Point3<f64>; 8] {
        std::array::from_fn(|m| {
            Point3::new((m & 1) as f64, ((m >> 1) & 1) as f64, ((m >> 2) & 1) as f64)
        })
    }

    fn auxetic_graph() -> BeamGraph {
        match make_auxetic_cell(&TileSpec::auxetic(2e-4)).unwrap() {
            TileGeometry::Beam(g) => g,
            _ => unreachable!(),
        }
    }

    #[test]
    fn identity_embedding() {
        let g = auxetic_graph();
        let e = embed_beam_cell(&unit_corners(), &g).unwrap();
        for (a, b) in g.nodes().iter().zip(e.nodes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn uniform_scaling_scales_lengths_not_radii() {
        let g = auxetic_graph();
        let corners = std::array::from_fn(|m| {
            Point3::new(
                2.0 * (m & 1) as f64,
                2.0 * ((m >> 1) & 1) as f64,
                2.0 * ((m >> 2) & 1) as f64,
            )
        });
        let e = embed_beam_cell(&corners, &g).unwrap();
        for (a, b) in g.nodes().iter().zip(e.nodes()) {
            assert!((2.0 * a.coords - b.coords).norm() < 1e-14);
        }
        for (ea, eb) in g.edges().iter().zip(e.edges()) {
            assert_eq!(ea.radius, eb.radius);
            assert!((2.0 * g.edge_length(ea) - e.edge_length(eb)).abs() < 1e-13);
        }
    }

    #[test]
    fn sheared_cell_matches_pointwise_trilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let corners: [Point3<f64>; 8] = std::array::from_fn(|m| {
            Point3::new(
                (m & 1) as f64 + 0.3 * ((m >> 1) & 1) as f64 + rng.gen_range(-0.05..0.05),
                ((m >> 1) & 1) as f64 + rng.gen_range(-0.05..0.05),
                ((m >> 2) & 1) as f64 + rng.gen_range(-0.05..0.05),
            )
        });
        let g = auxetic_graph();
        let e = embed_beam_cell(&corners, &g).unwrap();
        for (orig, emb) in g.nodes().iter().zip(e.nodes()) {
            let direct = trilinear(&corners, orig.x, orig.y, orig.z);
            assert!((direct - emb).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_cell_rejected() {
        let corners = [Point3::new(0.0, 0.0, 0.0); 8];
        assert!(matches!(
            embed_beam_cell(&corners, &auxetic_graph()),
            Err(LatticeError::DegenerateCell)
        ));
    }

    #[test]
    fn stacked_cells_merge_shared_nodes() {
        let g = auxetic_graph();
        let above = g.mapped(|p| Point3::new(p.x, p.y, p.z + 1.0));
        let n = g.node_count();
        let (merged, report) = merge_graphs(&[g, above], 1e-9).unwrap();
        // One shared node (top center == bottom center of the next cell).
        assert_eq!(merged.node_count(), 2 * n - 1);
        assert_eq!(report.nodes_in, 2 * n);
    }

    #[test]
    fn zero_tolerance_disjoint_union() {
        let g = auxetic_graph();
        let far = g.mapped(|p| Point3::new(p.x + 5.0, p.y, p.z));
        let (merged, _) = merge_graphs(&[g.clone(), far], 0.0).unwrap();
        assert_eq!(merged.node_count(), 2 * g.node_count());
        assert_eq!(merged.edge_count(), 2 * g.edge_count());
    }

    #[test]
    fn merging_same_graph_twice_is_idempotent() {
        let g = auxetic_graph();
        let (once, _) = merge_graphs(&[g.clone()], 1e-9).unwrap();
        let (twice, _) = merge_graphs(&[g.clone(), g.clone()], 1e-9).unwrap();
        assert_eq!(once.node_count(), twice.node_count());
        assert_eq!(once.edge_count(), twice.edge_count());
        for (a, b) in once.nodes().iter().zip(twice.nodes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn merge_is_order_independent() {
        let g = auxetic_graph();
        let b = g.mapped(|p| Point3::new(p.x + 1.0, p.y, p.z));
        let c = g.mapped(|p| Point3::new(p.x, p.y + 1.0, p.z));
        let (m1, _) = merge_graphs(&[g.clone(), b.clone(), c.clone()], 1e-9).unwrap();
        let (m2, _) = merge_graphs(&[c, g.clone(), b], 1e-9).unwrap();
        assert_eq!(m1.node_count(), m2.node_count());
        assert_eq!(m1.edge_count(), m2.edge_count());
        for (a, b) in m1.nodes().iter().zip(m2.nodes()) {
            assert!((a - b).norm() < 1e-15);
        }
        for (ea, eb) in m1.edges().iter().zip(m2.edges()) {
            assert_eq!((ea.a, ea.b), (eb.a, eb.b));
            assert_eq!(ea.radius, eb.radius);
        }
    }
}
