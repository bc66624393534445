use std::collections::{HashMap, VecDeque};

use super::{edge_key, local_edge_vertices, BoundaryLabel, Mesh, Point2, Triangle};
use crate::error::{Error, Result};

impl Mesh {
    /// Red refinement: every triangle is split into four similar children
    /// through its edge midpoints. Children are numbered `4t..4t+4` and
    /// receive longest-edge refinement edges.
    pub fn uniform_refine(&self) -> Mesh {
        let nv = self.num_vertices();
        let mut vertices = self.vertices.clone();
        vertices.extend(self.edges.iter().map(|e| {
            let [a, b] = e.vertices;
            Point2::from((self.vertices[a].coords + self.vertices[b].coords) * 0.5)
        }));

        let mut triangles = Vec::with_capacity(4 * self.num_triangles());
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = tri.vertices;
            let ids = self.triangle_edges[t];
            // midpoint opposite local vertex i
            let (ma, mb, mc) = (nv + ids[0], nv + ids[1], nv + ids[2]);
            for vertices in [[a, mc, mb], [mc, b, ma], [mb, ma, c], [ma, mb, mc]] {
                triangles.push(Triangle {
                    vertices,
                    refinement_edge: 0,
                    parent: Some(t),
                });
            }
        }

        let mut labels = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.is_boundary() {
                let [a, b] = edge.vertices;
                labels.insert(edge_key(a, nv + e), edge.label);
                labels.insert(edge_key(nv + e, b), edge.label);
            }
        }
        Mesh::from_parts(vertices, triangles, &labels)
            .expect("red refinement of a valid mesh is valid")
            .with_longest_edge_marking()
    }

    /// Newest-vertex bisection of the `marked` triangles followed by the
    /// conforming closure. Each refined triangle is bisected along its
    /// refinement edge, and its children again along theirs whenever that
    /// edge was marked by the closure (at most three bisections per step).
    pub fn bisect(&self, marked: &[usize]) -> Result<Mesh> {
        if let Some(&t) = marked.iter().find(|&&t| t >= self.num_triangles()) {
            return Err(Error::Mesh(format!("marked triangle {t} does not exist")));
        }
        self.check_conforming()?;
        if marked.is_empty() {
            return Ok(self.clone());
        }

        let ref_edge = |t: usize| self.triangle_edges[t][self.triangles[t].refinement_edge];
        let mut edge_marked = vec![false; self.num_edges()];
        let mut queue = VecDeque::new();
        for &t in marked {
            let e = ref_edge(t);
            if !edge_marked[e] {
                edge_marked[e] = true;
                queue.push_back(e);
            }
        }
        // Closure: any triangle touching a marked edge must have its
        // refinement edge marked too.
        while let Some(e) = queue.pop_front() {
            let (t0, t1) = self.edges[e].adjacent;
            for t in std::iter::once(t0).chain(t1) {
                let r = ref_edge(t);
                if !edge_marked[r] {
                    edge_marked[r] = true;
                    queue.push_back(r);
                }
            }
        }

        let mut vertices = self.vertices.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge_marked[e] {
                let [a, b] = edge.vertices;
                midpoint.insert((a, b), vertices.len());
                vertices.push(Point2::from(
                    (self.vertices[a].coords + self.vertices[b].coords) * 0.5,
                ));
            }
        }

        let mut triangles = Vec::with_capacity(self.num_triangles() + 2 * marked.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            split_recursive(tri.vertices, tri.refinement_edge, t, &midpoint, &mut triangles);
        }

        let mut labels = HashMap::new();
        for edge in self.edges.iter().filter(|e| e.is_boundary()) {
            let [a, b] = edge.vertices;
            match midpoint.get(&(a, b)) {
                Some(&m) => {
                    labels.insert(edge_key(a, m), edge.label);
                    labels.insert(edge_key(m, b), edge.label);
                }
                None => {
                    labels.insert((a, b), edge.label);
                }
            }
        }
        debug_assert!(labels.values().all(|&l| l != BoundaryLabel::Interior));
        Mesh::from_parts(vertices, triangles, &labels)
    }
}

fn split_recursive(
    verts: [usize; 3],
    refinement_edge: usize,
    parent: usize,
    midpoint: &HashMap<(usize, usize), usize>,
    out: &mut Vec<Triangle>,
) {
    let (b, c) = local_edge_vertices(&verts, refinement_edge);
    match midpoint.get(&edge_key(b, c)) {
        Some(&m) => {
            let a = verts[refinement_edge];
            // The new vertex is opposite each child's refinement edge.
            split_recursive([a, b, m], 2, parent, midpoint, out);
            split_recursive([a, m, c], 1, parent, midpoint, out);
        }
        None => out.push(Triangle {
            vertices: verts,
            refinement_edge,
            parent: Some(parent),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{l_shape_mesh, unit_square_mesh};
    use rand::{Rng, SeedableRng};

    #[test]
    fn red_refinement_counts_and_h() {
        let m = unit_square_mesh(1);
        let r = m.uniform_refine();
        assert_eq!(r.num_triangles(), 8);
        assert!((r.h_max() - m.h_max() / 2.0).abs() < 1e-15);
        assert!((r.total_area() - 1.0).abs() < 1e-12);
        r.check_conforming().unwrap();
        let rr = r.uniform_refine();
        assert!((rr.h_max() - 2f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn empty_marking_is_identity() {
        let m = unit_square_mesh(2);
        let b = m.bisect(&[]).unwrap();
        assert_eq!(b.triangles(), m.triangles());
        assert_eq!(b.vertices(), m.vertices());
    }

    #[test]
    fn full_marking_bisects_every_triangle() {
        let m = unit_square_mesh(2);
        let all: Vec<usize> = (0..m.num_triangles()).collect();
        let b = m.bisect(&all).unwrap();
        b.check_conforming().unwrap();
        let mut children = vec![0; m.num_triangles()];
        for tri in b.triangles() {
            children[tri.parent.unwrap()] += 1;
        }
        assert!(children.iter().all(|&c| c >= 2));
        assert!((b.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_mark_stays_conforming() {
        let m = unit_square_mesh(2);
        for t in 0..m.num_triangles() {
            let b = m.bisect(&[t]).unwrap();
            b.check_conforming().unwrap();
            assert!(b.num_triangles() > m.num_triangles());
        }
    }

    #[test]
    fn out_of_range_mark_is_rejected() {
        assert!(unit_square_mesh(1).bisect(&[7]).is_err());
    }

    #[test]
    fn new_vertex_is_opposite_refinement_edge() {
        let m = unit_square_mesh(1);
        let b = m.bisect(&[0]).unwrap();
        let new_vertices: Vec<usize> = (m.num_vertices()..b.num_vertices()).collect();
        for tri in b.triangles() {
            let peak = tri.vertices[tri.refinement_edge];
            if tri.vertices.iter().any(|v| new_vertices.contains(v)) {
                assert!(new_vertices.contains(&peak));
            }
        }
    }

    #[test]
    fn boundary_labels_are_inherited() {
        let m = unit_square_mesh(2)
            .with_boundary_labels(|a, b| {
                if a.y == 0.0 && b.y == 0.0 {
                    BoundaryLabel::Neumann
                } else {
                    BoundaryLabel::Dirichlet
                }
            })
            .unwrap();
        let all: Vec<usize> = (0..m.num_triangles()).collect();
        for r in [m.uniform_refine(), m.bisect(&all).unwrap()] {
            for e in r.edges().iter().filter(|e| e.is_boundary()) {
                let [a, b] = e.vertices;
                let bottom = r.vertices()[a].y == 0.0 && r.vertices()[b].y == 0.0;
                let expected = if bottom {
                    BoundaryLabel::Neumann
                } else {
                    BoundaryLabel::Dirichlet
                };
                assert_eq!(e.label, expected);
            }
        }
    }

    #[test]
    fn randomized_marking_sequences_stay_conforming() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for start in [unit_square_mesh(2), l_shape_mesh()] {
            let area = start.total_area();
            let mut m = start;
            for step in 0..8 {
                let marked: Vec<usize> = (0..m.num_triangles())
                    .filter(|_| rng.gen_bool(0.2))
                    .collect();
                m = if step == 4 { m.uniform_refine() } else { m.bisect(&marked).unwrap() };
                m.check_conforming().unwrap();
                assert!((m.total_area() - area).abs() <= 1e-12 * area);
                for e in m.edges().iter().filter(|e| !e.is_boundary()) {
                    let (t0, t1) = e.adjacent;
                    let l0 = m.triangle_edges(t0).iter().position(|&x| {
                        m.edges()[x].vertices == e.vertices
                    });
                    let l1 = m.triangle_edges(t1.unwrap()).iter().position(|&x| {
                        m.edges()[x].vertices == e.vertices
                    });
                    let s = m.orientation(t0, l0.unwrap()) + m.orientation(t1.unwrap(), l1.unwrap());
                    assert_eq!(s, 0.0);
                }
            }
        }
    }
}
