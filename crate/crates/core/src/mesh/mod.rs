//! Conforming triangulations of polygonal domains.
//!
//! A [`Mesh`] owns its vertices, counterclockwise triangles and the skeleton
//! (edge list). Every edge carries a fixed global unit normal: for interior
//! edges it is the tangent from the lower to the higher vertex id rotated by
//! −90°, for boundary edges it points outward. Elements relate their own
//! outward normal to that global normal through [`Mesh::orientation`].
//!
//! Meshes are immutable values; [`uniform_refine`](Mesh::uniform_refine) and
//! [`bisect`](Mesh::bisect) return new meshes.

mod generators;
mod refine;

use std::collections::HashMap;
use std::io::Write;

use nalgebra::Vector2;

use crate::error::{Error, Result};

pub use generators::{l_shape_mesh, unit_square_mesh};

pub type Point2 = nalgebra::Point2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryLabel {
    Dirichlet,
    Neumann,
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    /// Counterclockwise vertex ids.
    pub vertices: [usize; 3],
    /// Local edge index (edge `i` is opposite vertex `i`) bisected next.
    pub refinement_edge: usize,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Sorted vertex ids; the edge parameter runs from `vertices[0]` to `vertices[1]`.
    pub vertices: [usize; 2],
    pub label: BoundaryLabel,
    pub adjacent: (usize, Option<usize>),
    pub normal: Vector2<f64>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.adjacent.1.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point2>,
    triangles: Vec<Triangle>,
    edges: Vec<Edge>,
    triangle_edges: Vec<[usize; 3]>,
    triangle_signs: Vec<[f64; 3]>,
}

/// Local edge `i` of a triangle joins vertices `i+1` and `i+2` (mod 3).
pub fn local_edge_vertices(tri: &[usize; 3], local_edge: usize) -> (usize, usize) {
    (tri[(local_edge + 1) % 3], tri[(local_edge + 2) % 3])
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    /// Builds a mesh from vertices and triangles. Edges with a single
    /// neighbour take their label from `boundary_labels` (keyed by sorted
    /// vertex pair) and default to Dirichlet.
    pub fn from_parts(
        vertices: Vec<Point2>,
        triangles: Vec<Triangle>,
        boundary_labels: &HashMap<(usize, usize), BoundaryLabel>,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = tri.vertices;
            if a == b || b == c || a == c {
                return Err(Error::Mesh(format!("triangle {t} has repeated vertices")));
            }
            if tri.vertices.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
            if tri.refinement_edge > 2 {
                return Err(Error::Mesh(format!("triangle {t} has invalid refinement edge")));
            }
            let area = signed_area(&vertices[a], &vertices[b], &vertices[c]);
            if !(area > 0.0) {
                return Err(Error::Mesh(format!("triangle {t} is not counterclockwise")));
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_vertices: Vec<[usize; 2]> = Vec::new();
        let mut adjacency: Vec<Vec<usize>> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut ids = [0usize; 3];
            for (i, id) in ids.iter_mut().enumerate() {
                let (a, b) = local_edge_vertices(&tri.vertices, i);
                let key = edge_key(a, b);
                let e = *lookup.entry(key).or_insert_with(|| {
                    edge_vertices.push([key.0, key.1]);
                    adjacency.push(Vec::new());
                    edge_vertices.len() - 1
                });
                adjacency[e].push(t);
                *id = e;
            }
            triangle_edges.push(ids);
        }

        let mut edges = Vec::with_capacity(edge_vertices.len());
        for (e, verts) in edge_vertices.iter().enumerate() {
            let adj = &adjacency[e];
            if adj.len() > 2 {
                return Err(Error::Mesh(format!(
                    "edge ({}, {}) is shared by {} triangles",
                    verts[0],
                    verts[1],
                    adj.len()
                )));
            }
            let tangent = vertices[verts[1]] - vertices[verts[0]];
            let mut normal = Vector2::new(tangent.y, -tangent.x).normalize();
            let (adjacent, label) = if adj.len() == 2 {
                ((adj[0], Some(adj[1])), BoundaryLabel::Interior)
            } else {
                let label = boundary_labels
                    .get(&(verts[0], verts[1]))
                    .copied()
                    .unwrap_or(BoundaryLabel::Dirichlet);
                if label == BoundaryLabel::Interior {
                    return Err(Error::Mesh("boundary edge labelled Interior".into()));
                }
                let t = adj[0];
                let local = triangle_edges[t].iter().position(|&x| x == e).unwrap();
                if normal.dot(&outward_normal(&vertices, &triangles[t].vertices, local)) < 0.0 {
                    normal = -normal;
                }
                ((t, None), label)
            };
            edges.push(Edge {
                vertices: *verts,
                label,
                adjacent,
                normal,
            });
        }

        let triangle_signs = triangles
            .iter()
            .zip(&triangle_edges)
            .map(|(tri, ids)| {
                let mut s = [0.0; 3];
                for i in 0..3 {
                    let n = outward_normal(&vertices, &tri.vertices, i);
                    s[i] = if n.dot(&edges[ids[i]].normal) > 0.0 { 1.0 } else { -1.0 };
                }
                s
            })
            .collect();

        Ok(Mesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            triangle_signs,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Global edge ids of the three local edges of triangle `t`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// +1 if the outward normal of triangle `t` on `local_edge` equals the
    /// stored global normal of that edge, −1 otherwise.
    pub fn orientation(&self, t: usize, local_edge: usize) -> f64 {
        self.triangle_signs[t][local_edge]
    }

    pub fn corners(&self, t: usize) -> [Point2; 3] {
        let [a, b, c] = self.triangles[t].vertices;
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(&a, &b, &c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point2 {
        let [a, b, c] = self.corners(t);
        Point2::from((a.coords + b.coords + c.coords) / 3.0)
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[b] - self.vertices[a]).norm()
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        self.triangle_edges[t]
            .iter()
            .map(|&e| self.edge_length(e))
            .fold(0.0, f64::max)
    }

    /// Maximum edge length over the mesh.
    pub fn h_max(&self) -> f64 {
        (0..self.num_edges())
            .map(|e| self.edge_length(e))
            .fold(0.0, f64::max)
    }

    /// Outward unit normal of triangle `t` on `local_edge`.
    pub fn outward_normal(&self, t: usize, local_edge: usize) -> Vector2<f64> {
        outward_normal(&self.vertices, &self.triangles[t].vertices, local_edge)
    }

    pub fn boundary_labels(&self) -> HashMap<(usize, usize), BoundaryLabel> {
        self.edges
            .iter()
            .filter(|e| e.is_boundary())
            .map(|e| ((e.vertices[0], e.vertices[1]), e.label))
            .collect()
    }

    /// Returns a copy with every boundary edge relabelled by `label_of`,
    /// which receives the two edge endpoints.
    pub fn with_boundary_labels(
        &self,
        label_of: impl Fn(&Point2, &Point2) -> BoundaryLabel,
    ) -> Result<Self> {
        let labels = self
            .edges
            .iter()
            .filter(|e| e.is_boundary())
            .map(|e| {
                let [a, b] = e.vertices;
                ((a, b), label_of(&self.vertices[a], &self.vertices[b]))
            })
            .collect();
        Mesh::from_parts(self.vertices.clone(), self.triangles.clone(), &labels)
    }

    /// Resets every refinement edge to the longest edge of its triangle, ties
    /// broken by the smallest global edge id.
    pub fn with_longest_edge_marking(mut self) -> Self {
        for t in 0..self.triangles.len() {
            let ids = self.triangle_edges[t];
            let mut best = 0;
            for i in 1..3 {
                let (li, lb) = (self.edge_length(ids[i]), self.edge_length(ids[best]));
                let tol = 1e-12 * lb.max(li);
                if li > lb + tol || ((li - lb).abs() <= tol && ids[i] < ids[best]) {
                    best = i;
                }
            }
            self.triangles[t].refinement_edge = best;
        }
        self
    }

    /// Conformity audit: checks edge multiplicities, triangle orientation and
    /// the absence of hanging nodes on edges with a single neighbour.
    pub fn check_conforming(&self) -> Result<()> {
        for (t, _) in self.triangles.iter().enumerate() {
            if !(self.area(t) > 0.0) {
                return Err(Error::Mesh(format!("triangle {t} has non-positive area")));
            }
        }
        let mut seen = vec![0usize; self.edges.len()];
        for ids in &self.triangle_edges {
            for &e in ids {
                seen[e] += 1;
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            let expected = if edge.is_boundary() { 1 } else { 2 };
            if seen[e] != expected {
                return Err(Error::Mesh(format!("edge {e} has {} neighbours", seen[e])));
            }
            if edge.is_boundary() == (edge.label == BoundaryLabel::Interior) {
                return Err(Error::Mesh(format!("edge {e} has an inconsistent label")));
            }
        }
        // A hanging node shows up as a vertex in the interior of an edge that
        // only one triangle sees.
        for edge in self.edges.iter().filter(|e| e.is_boundary()) {
            let [a, b] = edge.vertices;
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            let d = pb - pa;
            let len2 = d.norm_squared();
            for (v, p) in self.vertices.iter().enumerate() {
                if v == a || v == b {
                    continue;
                }
                let s = (p - pa).dot(&d) / len2;
                if s <= 1e-12 || s >= 1.0 - 1e-12 {
                    continue;
                }
                let dist = (p - pa - d * s).norm();
                if dist <= 1e-12 * len2.sqrt() {
                    return Err(Error::Mesh(format!("hanging node {v} on edge ({a}, {b})")));
                }
            }
        }
        Ok(())
    }

    /// Plain-text dump: `v x y`, `t i j k`, `b i j label` lines.
    pub fn write_dump(&self, mut w: impl Write) -> std::io::Result<()> {
        for p in &self.vertices {
            writeln!(w, "v {} {}", p.x, p.y)?;
        }
        for tri in &self.triangles {
            let [a, b, c] = tri.vertices;
            writeln!(w, "t {a} {b} {c}")?;
        }
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            let label = match e.label {
                BoundaryLabel::Dirichlet => "dirichlet",
                BoundaryLabel::Neumann => "neumann",
                BoundaryLabel::Interior => "interior",
            };
            writeln!(w, "b {} {} {label}", e.vertices[0], e.vertices[1])?;
        }
        Ok(())
    }
}

pub fn signed_area(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

fn outward_normal(vertices: &[Point2], tri: &[usize; 3], local_edge: usize) -> Vector2<f64> {
    let (a, b) = local_edge_vertices(tri, local_edge);
    let d = vertices[b] - vertices[a];
    Vector2::new(d.y, -d.x).normalize()
}
