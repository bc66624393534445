//! Global numbering of the four trial fields.
//!
//! Global indices are contiguous per field: stresses, displacements, fluxes,
//! then displacement traces. Broken fields are numbered element by element.
//! Fluxes live on edges (Neumann edges carry no unknowns) and are expressed
//! against the edge's global normal; the element gather list carries the
//! orientation sign. Traces are continuous nodal P^{k+1} on the skeleton with
//! vertex dofs first and edge-interior Gauss-Lobatto nodes after; nodes on
//! the closed Dirichlet boundary become prescribed values.

use std::ops::Range;

use super::basis::dim_p;
use crate::mesh::{BoundaryLabel, Mesh, Point2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofRef {
    Free(usize),
    /// Prescribed trace value: component `component` at Dirichlet node `node`.
    Fixed { node: usize, component: usize },
    /// Homogeneous Neumann flux.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDof {
    pub dof: DofRef,
    pub sign: f64,
}

#[derive(Debug, Clone)]
pub struct SpaceLayout {
    pub k: usize,
    pub j: usize,
    pub sigma: Range<usize>,
    pub u: Range<usize>,
    pub flux: Range<usize>,
    pub uhat: Range<usize>,
    /// Positions of prescribed trace nodes.
    pub dirichlet_nodes: Vec<Point2>,
    element_dofs: Vec<Vec<LocalDof>>,
}

impl SpaceLayout {
    pub fn ndof(&self) -> usize {
        self.uhat.end
    }

    pub fn num_elements(&self) -> usize {
        self.element_dofs.len()
    }

    /// Gather list of element `t`, ordered σ | u | flux | û.
    pub fn element_dofs(&self, t: usize) -> &[LocalDof] {
        &self.element_dofs[t]
    }

    pub fn sigma_local(&self) -> usize {
        4 * dim_p(self.k)
    }

    pub fn u_local(&self) -> usize {
        2 * dim_p(self.k + self.j)
    }

    pub fn flux_local(&self) -> usize {
        3 * 2 * (self.k + 1)
    }

    pub fn uhat_local(&self) -> usize {
        2 * 3 + 3 * 2 * self.k
    }

    pub fn trial_local(&self) -> usize {
        self.sigma_local() + self.u_local() + self.flux_local() + self.uhat_local()
    }

    /// Local test dimensions (τ, v, q).
    pub fn test_local_dims(&self) -> (usize, usize, usize) {
        (3 * dim_p(self.k + 2), 2 * dim_p(self.k + 2), dim_p(self.k))
    }

    pub fn test_local(&self) -> usize {
        let (a, b, c) = self.test_local_dims();
        a + b + c
    }

    /// Local index of trace dof for vertex `vertex` (0..3), component `c`.
    pub fn uhat_vertex_local(&self, vertex: usize, c: usize) -> usize {
        self.sigma_local() + self.u_local() + self.flux_local() + 2 * vertex + c
    }

    /// Local index of the `node`-th interior trace node on local edge `edge`.
    pub fn uhat_edge_local(&self, edge: usize, node: usize, c: usize) -> usize {
        self.sigma_local()
            + self.u_local()
            + self.flux_local()
            + 6
            + edge * 2 * self.k
            + 2 * node
            + c
    }

    /// Local index of flux mode `mode`, component `c`, on local edge `edge`.
    pub fn flux_local_index(&self, edge: usize, c: usize, mode: usize) -> usize {
        self.sigma_local() + self.u_local() + edge * 2 * (self.k + 1) + c * (self.k + 1) + mode
    }
}

/// Builds the layout of `U_h^{k,j}` on `mesh`.
pub fn build_layout(mesh: &Mesh, k: usize, j: usize) -> SpaceLayout {
    assert!(j <= 1, "j must be 0 or 1");
    let nt = mesh.num_triangles();
    let n_sigma = 4 * dim_p(k);
    let n_u = 2 * dim_p(k + j);
    let sigma = 0..nt * n_sigma;
    let u = sigma.end..sigma.end + nt * n_u;

    let mut flux_index = vec![None; mesh.num_edges()];
    let mut next = u.end;
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.label != BoundaryLabel::Neumann {
            flux_index[e] = Some(next);
            next += 2 * (k + 1);
        }
    }
    let flux = u.end..next;

    // Trace vertices on the closed Dirichlet boundary are prescribed.
    let mut on_dirichlet = vec![false; mesh.num_vertices()];
    for edge in mesh.edges() {
        if edge.label == BoundaryLabel::Dirichlet {
            on_dirichlet[edge.vertices[0]] = true;
            on_dirichlet[edge.vertices[1]] = true;
        }
    }
    let mut dirichlet_nodes = Vec::new();
    let mut vertex_dof = Vec::with_capacity(mesh.num_vertices());
    let uhat_start = next;
    for (v, &fixed) in on_dirichlet.iter().enumerate() {
        if fixed {
            vertex_dof.push(Err(dirichlet_nodes.len()));
            dirichlet_nodes.push(mesh.vertices()[v]);
        } else {
            vertex_dof.push(Ok(next));
            next += 2;
        }
    }
    let nodal = (k >= 1).then(|| super::basis::LobattoNodal::new(k + 1));
    let mut edge_dof = Vec::with_capacity(mesh.num_edges());
    for edge in mesh.edges() {
        if k == 0 {
            edge_dof.push(Ok(0));
        } else if edge.label == BoundaryLabel::Dirichlet {
            edge_dof.push(Err(dirichlet_nodes.len()));
            let [a, b] = edge.vertices;
            let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
            for &s in &nodal.as_ref().unwrap().nodes[1..=k] {
                dirichlet_nodes.push(pa + (pb - pa) * s);
            }
        } else {
            edge_dof.push(Ok(next));
            next += 2 * k;
        }
    }
    let uhat = uhat_start..next;

    let mut layout = SpaceLayout {
        k,
        j,
        sigma,
        u,
        flux,
        uhat,
        dirichlet_nodes,
        element_dofs: Vec::with_capacity(nt),
    };
    let free = |g: usize| LocalDof {
        dof: DofRef::Free(g),
        sign: 1.0,
    };
    for t in 0..nt {
        let mut dofs = Vec::with_capacity(layout.trial_local());
        dofs.extend((0..n_sigma).map(|i| free(layout.sigma.start + t * n_sigma + i)));
        dofs.extend((0..n_u).map(|i| free(layout.u.start + t * n_u + i)));
        let edges = mesh.triangle_edges(t);
        for (le, &e) in edges.iter().enumerate() {
            let sign = mesh.orientation(t, le);
            for i in 0..2 * (k + 1) {
                dofs.push(match flux_index[e] {
                    Some(start) => LocalDof {
                        dof: DofRef::Free(start + i),
                        sign,
                    },
                    None => LocalDof {
                        dof: DofRef::Zero,
                        sign,
                    },
                });
            }
        }
        for &v in &mesh.triangles()[t].vertices {
            for c in 0..2 {
                dofs.push(match vertex_dof[v] {
                    Ok(g) => free(g + c),
                    Err(node) => LocalDof {
                        dof: DofRef::Fixed { node, component: c },
                        sign: 1.0,
                    },
                });
            }
        }
        for &e in &edges {
            for m in 0..k {
                for c in 0..2 {
                    dofs.push(match edge_dof[e] {
                        Ok(g) => free(g + 2 * m + c),
                        Err(node) => LocalDof {
                            dof: DofRef::Fixed {
                                node: node + m,
                                component: c,
                            },
                            sign: 1.0,
                        },
                    });
                }
            }
        }
        debug_assert_eq!(dofs.len(), layout.trial_local());
        layout.element_dofs.push(dofs);
    }
    layout
}
