//! Axis-aligned bounding-volume hierarchy over triangles with exact
//! point-triangle distance queries.

use super::mesh::TriMesh;
use nalgebra::{Point3, Vector3};

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: Point3<f64>,
    hi: Point3<f64>,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            lo: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            hi: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: &Point3<f64>) {
        for c in 0..3 {
            self.lo[c] = self.lo[c].min(p[c]);
            self.hi[c] = self.hi[c].max(p[c]);
        }
    }

    fn distance_sq(&self, p: &Point3<f64>) -> f64 {
        let mut d2 = 0.0;
        for c in 0..3 {
            let d = if p[c] < self.lo[c] {
                self.lo[c] - p[c]
            } else if p[c] > self.hi[c] {
                p[c] - self.hi[c]
            } else {
                0.0
            };
            d2 += d * d;
        }
        d2
    }
}

enum Node {
    Leaf { tris: Vec<usize> },
    Inner { left: usize, right: usize },
}

/// Static BVH over the (non-degenerate) triangles of a mesh.
pub struct TriangleBvh {
    nodes: Vec<(Aabb, Node)>,
    root: usize,
    tri_points: Vec<[Point3<f64>; 3]>,
    tri_normals: Vec<Vector3<f64>>,
    degenerate: usize,
}

const LEAF_SIZE: usize = 8;

impl TriangleBvh {
    pub fn build(mesh: &TriMesh) -> Self {
        let mut tri_points = Vec::new();
        let mut tri_normals = Vec::new();
        let mut degenerate = 0;
        for t in 0..mesh.triangles.len() {
            let pts = mesh.triangle_points(t);
            let n = (pts[1] - pts[0]).cross(&(pts[2] - pts[0]));
            if n.norm() == 0.0 {
                degenerate += 1;
                continue;
            }
            tri_points.push(pts);
            tri_normals.push(n.normalize());
        }
        let mut bvh = Self {
            nodes: Vec::new(),
            root: 0,
            tri_points,
            tri_normals,
            degenerate,
        };
        let all: Vec<usize> = (0..bvh.tri_points.len()).collect();
        bvh.root = bvh.build_node(all);
        bvh
    }

    pub fn degenerate_skipped(&self) -> usize {
        self.degenerate
    }

    fn bbox_of(&self, tris: &[usize]) -> Aabb {
        let mut bb = Aabb::empty();
        for &t in tris {
            for p in &self.tri_points[t] {
                bb.grow(p);
            }
        }
        bb
    }

    fn build_node(&mut self, mut tris: Vec<usize>) -> usize {
        let bb = self.bbox_of(&tris);
        if tris.len() <= LEAF_SIZE {
            self.nodes.push((bb, Node::Leaf { tris }));
            return self.nodes.len() - 1;
        }
        // Median split on centroids along the longest box axis.
        let mut axis = 0;
        let mut span = 0.0;
        for c in 0..3 {
            let s = bb.hi[c] - bb.lo[c];
            if s > span {
                span = s;
                axis = c;
            }
        }
        let centroid = |t: usize| {
            let [a, b, c] = self.tri_points[t];
            (a.coords + b.coords + c.coords)[axis] / 3.0
        };
        tris.sort_by(|&a, &b| centroid(a).partial_cmp(&centroid(b)).unwrap());
        let right_half = tris.split_off(tris.len() / 2);
        let left = self.build_node(tris);
        let right = self.build_node(right_half);
        self.nodes.push((bb, Node::Inner { left, right }));
        self.nodes.len() - 1
    }

    /// Closest point on triangle `t` to `p` (Ericson, Real-Time
    /// Collision Detection).
    fn closest_on_triangle(&self, t: usize, p: &Point3<f64>) -> Point3<f64> {
        let [a, b, c] = self.tri_points[t];
        let ab = b - a;
        let ac = c - a;
        let ap = p - a;
        let d1 = ab.dot(&ap);
        let d2 = ac.dot(&ap);
        if d1 <= 0.0 && d2 <= 0.0 {
            return a;
        }
        let bp = p - b;
        let d3 = ab.dot(&bp);
        let d4 = ac.dot(&bp);
        if d3 >= 0.0 && d4 <= d3 {
            return b;
        }
        let vc = d1 * d4 - d3 * d2;
        if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
            let v = d1 / (d1 - d3);
            return a + v * ab;
        }
        let cp = p - c;
        let d5 = ab.dot(&cp);
        let d6 = ac.dot(&cp);
        if d6 >= 0.0 && d5 <= d6 {
            return c;
        }
        let vb = d5 * d2 - d1 * d6;
        if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
            let w = d2 / (d2 - d6);
            return a + w * ac;
        }
        let va = d3 * d6 - d5 * d4;
        if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
            let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
            return b + w * (c - b);
        }
        let denom = 1.0 / (va + vb + vc);
        let v = vb * denom;
        let w = vc * denom;
        a + v * ab + w * ac
    }

    /// Nearest triangle and closest point.
    pub fn nearest(&self, p: &Point3<f64>) -> (usize, Point3<f64>, f64) {
        let mut best = (usize::MAX, *p, f64::INFINITY);
        let mut stack = vec![self.root];
        while let Some(ni) = stack.pop() {
            let (bb, node) = &self.nodes[ni];
            if bb.distance_sq(p) >= best.2 {
                continue;
            }
            match node {
                Node::Leaf { tris } => {
                    for &t in tris {
                        let q = self.closest_on_triangle(t, p);
                        let d2 = (p - q).norm_squared();
                        if d2 < best.2 {
                            best = (t, q, d2);
                        }
                    }
                }
                Node::Inner { left, right } => {
                    // Visit the closer child first.
                    let dl = self.nodes[*left].0.distance_sq(p);
                    let dr = self.nodes[*right].0.distance_sq(p);
                    if dl < dr {
                        stack.push(*right);
                        stack.push(*left);
                    } else {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        best
    }

    /// Signed distance: positive when `p` lies on the facet-normal side
    /// of the nearest triangle.
    pub fn signed_distance(&self, p: &Point3<f64>) -> f64 {
        let (t, q, d2) = self.nearest(p);
        let d = d2.sqrt();
        if (p - q).dot(&self.tri_normals[t]) >= 0.0 {
            d
        } else {
            -d
        }
    }

    /// Brute-force reference query (tests).
    pub fn signed_distance_brute(&self, p: &Point3<f64>) -> f64 {
        let mut best = (0usize, f64::INFINITY, *p);
        for t in 0..self.tri_points.len() {
            let q = self.closest_on_triangle(t, p);
            let d2 = (p - q).norm_squared();
            if d2 < best.1 {
                best = (t, d2, q);
            }
        }
        let d = best.1.sqrt();
        if (p - best.2).dot(&self.tri_normals[best.0]) >= 0.0 {
            d
        } else {
            -d
        }
    }
}
