//! Reduction of a lattice to a beam analysis mesh.

use super::build::LatticeModel;
use super::embed::merge_graphs;
use super::{LatticeError, Result};
use crate::tile::{BeamGraph, GraphEdge};
use nalgebra::{Point3, Vector3};

/// A subdivided strut mesh ready for beam analysis.
#[derive(Debug, Clone)]
pub struct BeamMesh {
    pub graph: BeamGraph,
    pub strut_count: usize,
}

impl BeamMesh {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
    pub fn element_count(&self) -> usize {
        self.graph.edge_count()
    }
}

/// Subdivides every strut of the lattice into `elements_per_strut` beam
/// elements.
///
/// Beam lattices subdivide their welded graph directly. Solid lattices
/// reduce each arm to its centerline: parametric stations mapped
/// through the macro volume (curved centerlines), with the equal-area
/// circular radius scaled by the local cell size from the macro
/// Jacobian.
pub fn extract_beam_model(lattice: &LatticeModel, elements_per_strut: usize) -> Result<BeamMesh> {
    if elements_per_strut == 0 {
        return Err(LatticeError::NoElements);
    }
    if let Some(g) = &lattice.beam_graph {
        let graph = subdivide_graph(g, elements_per_strut)?;
        return Ok(BeamMesh { graph, strut_count: g.edge_count() });
    }
    if lattice.cells.is_empty() {
        return Err(LatticeError::NoBeamContent);
    }

    // Solid reduction: build one polyline graph per strut axis, then
    // weld shared endpoints (face centers, cell centers).
    let mut pieces: Vec<BeamGraph> = Vec::new();
    let mut strut_count = 0;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    for cell in &lattice.cells {
        let size: [f64; 3] = std::array::from_fn(|c| cell.box_hi[c] - cell.box_lo[c]);
        for axis in &cell.axes_param {
            strut_count += 1;
            let a = Vector3::from(axis.a);
            let b = Vector3::from(axis.b);
            let mut g = BeamGraph::new();
            let mut prev: Option<usize> = None;
            let mut stations = Vec::with_capacity(elements_per_strut + 1);
            for s in 0..=elements_per_strut {
                let t = s as f64 / elements_per_strut as f64;
                let p = a + (b - a) * t;
                let world = lattice.macro_volume.eval_point(p.x, p.y, p.z)?;
                stations.push((p, world));
            }
            for (i, (_, world)) in stations.iter().enumerate() {
                let n = g.add_node(*world);
                if let Some(p) = prev {
                    // Equal-area radius at the segment midpoint: section
                    // side = thickness × local cross scale of the cell.
                    let (pa, _) = stations[i - 1];
                    let (pb, _) = stations[i];
                    let mid = (pa + pb) * 0.5;
                    let jac = lattice.macro_volume.jacobian(mid.x, mid.y, mid.z)?;
                    let dir = (pb - pa).normalize();
                    let (c1, c2) = cross_directions(dir);
                    let s1 = (jac * c1.component_mul(&Vector3::from(size))).norm();
                    let s2 = (jac * c2.component_mul(&Vector3::from(size))).norm();
                    let radius = axis.thickness * (s1 * s2).sqrt() / sqrt_pi;
                    g.add_edge(p, n, radius.max(1e-12));
                }
                prev = Some(n);
            }
            pieces.push(g);
        }
    }
    let (graph, _) = merge_graphs(&pieces, lattice.weld_tolerance)?;
    Ok(BeamMesh { graph, strut_count })
}

/// Subdivides every edge of a world-space graph into straight segments.
pub fn subdivide_graph(g: &BeamGraph, n: usize) -> Result<BeamGraph> {
    if n == 0 {
        return Err(LatticeError::NoElements);
    }
    let mut out = BeamGraph::new();
    for p in g.nodes() {
        out.add_node(*p);
    }
    for GraphEdge { a, b, radius } in g.edges() {
        let (pa, pb) = (g.nodes()[*a], g.nodes()[*b]);
        let mut prev = *a;
        for s in 1..=n {
            let next = if s == n {
                *b
            } else {
                out.add_node(Point3::from(
                    pa.coords + (pb.coords - pa.coords) * s as f64 / n as f64,
                ))
            };
            out.add_edge(prev, next, *radius);
            prev = next;
        }
    }
    out.validate()?;
    Ok(out)
}

/// Two unit vectors orthogonal to `dir` (parametric cross-section
/// directions).
fn cross_directions(dir: Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let seed = if dir.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let c1 = dir.cross(&seed).normalize();
    let c2 = dir.cross(&c1).normalize();
    (c1, c2)
}
