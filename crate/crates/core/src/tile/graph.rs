//! Strut graphs: nodes in space, edges with circular radii.

use super::{Result, TileError};
use nalgebra::Point3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    /// Strut radius in meters.
    pub radius: f64,
}

/// A beam graph: node coordinates plus radius-carrying edges.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BeamGraph {
    nodes: Vec<Point3<f64>>,
    edges: Vec<GraphEdge>,
}

impl BeamGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates indices, radii and edge lengths.
    pub fn from_parts(nodes: Vec<Point3<f64>>, edges: Vec<GraphEdge>) -> Result<Self> {
        let g = Self { nodes, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.a >= self.nodes.len() || e.b >= self.nodes.len() {
                return Err(TileError::BadGraph(format!("edge {i} references a missing node")));
            }
            if !(e.radius > 0.0) {
                return Err(TileError::BadGraph(format!("edge {i} has non-positive radius")));
            }
            if (self.nodes[e.a] - self.nodes[e.b]).norm() == 0.0 {
                return Err(TileError::BadGraph(format!("edge {i} has zero length")));
            }
        }
        Ok(())
    }

    pub fn add_node(&mut self, p: Point3<f64>) -> usize {
        self.nodes.push(p);
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, radius: f64) {
        self.edges.push(GraphEdge { a, b, radius });
    }

    pub fn nodes(&self) -> &[Point3<f64>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_length(&self, e: &GraphEdge) -> f64 {
        (self.nodes[e.a] - self.nodes[e.b]).norm()
    }

    /// Total strut volume `Σ π r² ℓ`.
    pub fn material_volume(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| std::f64::consts::PI * e.radius * e.radius * self.edge_length(e))
            .sum()
    }

    /// Applies a point transform to every node (radii unchanged).
    pub fn mapped(&self, f: impl Fn(Point3<f64>) -> Point3<f64>) -> Self {
        Self { nodes: self.nodes.iter().map(|&p| f(p)).collect(), edges: self.edges.clone() }
    }

    /// Node indices whose coordinates coincide with `other`'s nodes
    /// within `tol` (used by the periodic-binding tests).
    pub fn shared_nodes(&self, other: &Self, tol: f64) -> Vec<(usize, usize)> {
        let mut shared = Vec::new();
        for (i, p) in self.nodes.iter().enumerate() {
            for (j, q) in other.nodes.iter().enumerate() {
                if (p - q).norm() <= tol {
                    shared.push((i, j));
                }
            }
        }
        shared
    }
}

/// Simple cubic control lattice: `n³` cells of size `spacing` with
/// struts along the axes. The non-auxetic reference structure.
pub fn orthogonal_lattice_graph(n: usize, spacing: f64, radius: f64) -> BeamGraph {
    let mut g = BeamGraph::new();
    let id = |i: usize, j: usize, k: usize| (k * (n + 1) + j) * (n + 1) + i;
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                g.add_node(Point3::new(
                    i as f64 * spacing,
                    j as f64 * spacing,
                    k as f64 * spacing,
                ));
            }
        }
    }
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                if i < n {
                    g.add_edge(id(i, j, k), id(i + 1, j, k), radius);
                }
                if j < n {
                    g.add_edge(id(i, j, k), id(i, j + 1, k), radius);
                }
                if k < n {
                    g.add_edge(id(i, j, k), id(i, j, k + 1), radius);
                }
            }
        }
    }
    g
}
