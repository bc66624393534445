//! Element matrices of the ultra-weak formulation.
//!
//! Local test functions (rows) are ordered
//! `τ (3 symmetric components × P^{k+2}) | v (2 × P^{k+2}) | q (P^k)` and
//! local trial functions (columns) follow the layout order
//! `σ (4 × P^k) | u (2 × P^{k+j}) | σ̂ₙ (3 edges × 2 × P^k) | û (nodal P^{k+1})`.
//! Broken functions use the L²(T)-orthonormal modal basis.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::fem::basis::{edge_legendre, edge_rule, LobattoNodal};
use crate::fem::quadrature::{quad_rule, LineRule, QuadratureRule, MAX_DEGREE};
use crate::fem::{ElementGeometry, ScalarBasis, SpaceLayout};
use crate::material::{compliance_apply, LameParams, Problem};
use crate::mesh::Mesh;

/// Orthonormal basis of symmetric 2×2 matrices used for τ.
pub fn symmetric_unit(c: usize) -> Matrix2<f64> {
    match c {
        0 => Matrix2::new(1.0, 0.0, 0.0, 0.0),
        1 => Matrix2::new(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0),
        2 => Matrix2::new(0.0, 0.0, 0.0, 1.0),
        _ => unreachable!(),
    }
}

/// Unit antisymmetric matrix used for q.
pub fn skew_unit() -> Matrix2<f64> {
    Matrix2::new(0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0)
}

/// Unit matrix e_r ⊗ e_s for trial stress component `2r + s`.
pub fn matrix_unit(c: usize) -> Matrix2<f64> {
    let mut m = Matrix2::zeros();
    m[(c / 2, c % 2)] = 1.0;
    m
}

/// Reference-element data shared by all elements of one discretisation.
#[derive(Debug, Clone)]
pub struct ReferenceTables {
    pub k: usize,
    pub j: usize,
    pub test_basis: ScalarBasis,
    pub trial_basis: ScalarBasis,
    pub u_basis: ScalarBasis,
    volume: QuadratureRule,
    load: QuadratureRule,
    edge: LineRule,
    test_val: DMatrix<f64>,
    test_grad: [DMatrix<f64>; 2],
    trial_val: DMatrix<f64>,
    u_val: DMatrix<f64>,
    load_val: DMatrix<f64>,
    edge_modes: Vec<Vec<f64>>,
    edge_nodal: Vec<Vec<f64>>,
}

impl ReferenceTables {
    pub fn new(k: usize, j: usize) -> Self {
        let volume = quad_rule(2 * (k + 2) + 2).expect("supported degree");
        let load = quad_rule((2 * (k + 2) + 6).min(MAX_DEGREE)).expect("supported degree");
        let test_basis = ScalarBasis::new(k + 2);
        let trial_basis = ScalarBasis::new(k);
        let u_basis = ScalarBasis::new(k + j);
        let edge = edge_rule(k);
        let nodal = LobattoNodal::new(k + 1);
        ReferenceTables {
            k,
            j,
            test_val: test_basis.values(&volume.points),
            test_grad: test_basis.gradients(&volume.points),
            trial_val: trial_basis.values(&volume.points),
            u_val: u_basis.values(&volume.points),
            load_val: test_basis.values(&load.points),
            edge_modes: edge.points.iter().map(|&s| edge_legendre(k, s)).collect(),
            edge_nodal: edge.points.iter().map(|&s| nodal.eval(s)).collect(),
            test_basis,
            trial_basis,
            u_basis,
            volume,
            load,
            edge,
        }
    }

    pub fn n_test_scalar(&self) -> usize {
        self.test_basis.dim()
    }

    pub fn n_trial_scalar(&self) -> usize {
        self.trial_basis.dim()
    }

    pub fn n_test(&self) -> usize {
        5 * self.n_test_scalar() + self.n_trial_scalar()
    }
}

/// Test × trial matrix, Gram matrix and load of one element.
#[derive(Debug, Clone)]
pub struct ElementSystem {
    pub b: DMatrix<f64>,
    pub gram: DMatrix<f64>,
    pub load: DVector<f64>,
}

/// Gram matrix of the local test space in the inner product
/// (τ,τ') + (div τ, div τ') + (v,v') + (∇v,∇v') + (q,q').
pub fn element_gram(geo: &ElementGeometry, tables: &ReferenceTables) -> DMatrix<f64> {
    let n2 = tables.n_test_scalar();
    let n0 = tables.n_trial_scalar();
    let n = tables.n_test();
    let s = geo.basis_scale();
    let mut mass = DMatrix::<f64>::zeros(n2, n2);
    // physical gradients per point
    let mut gx = DMatrix::<f64>::zeros(n2, tables.volume.len());
    let mut gy = DMatrix::<f64>::zeros(n2, tables.volume.len());
    for p in 0..tables.volume.len() {
        for l in 0..n2 {
            let g = geo.push_gradient([tables.test_grad[0][(l, p)], tables.test_grad[1][(l, p)]]) * s;
            gx[(l, p)] = g.x;
            gy[(l, p)] = g.y;
        }
    }
    let wdet: Vec<f64> = tables.volume.weights.iter().map(|w| w * geo.det).collect();
    let weighted = |m: &DMatrix<f64>| {
        let mut out = m.clone();
        for (p, w) in wdet.iter().enumerate() {
            out.column_mut(p).scale_mut(*w);
        }
        out
    };
    let val = &tables.test_val * s;
    mass += &weighted(&val) * val.transpose();
    let gxx = &weighted(&gx) * gx.transpose();
    let gyy = &weighted(&gy) * gy.transpose();
    let gxy = &weighted(&gx) * gy.transpose();

    let mut g = DMatrix::<f64>::zeros(n, n);
    // τ block: div(E_c φ) = E_c ∇φ, so (div τ, div τ') = Σ_r (E_c ∇φ)_r (E_c' ∇φ')_r
    for c in 0..3 {
        let ec = symmetric_unit(c);
        for c2 in 0..3 {
            let ed = symmetric_unit(c2);
            // Σ_r Σ_{s,t} ec[r,s] ed[r,t] ∂_s φ ∂_t φ'
            let m = ec.transpose() * ed;
            for l in 0..n2 {
                for l2 in 0..n2 {
                    let mut v = m[(0, 0)] * gxx[(l, l2)]
                        + m[(0, 1)] * gxy[(l, l2)]
                        + m[(1, 0)] * gxy[(l2, l)]
                        + m[(1, 1)] * gyy[(l, l2)];
                    if c == c2 {
                        v += mass[(l, l2)];
                    }
                    g[(c * n2 + l, c2 * n2 + l2)] = v;
                }
            }
        }
    }
    for r in 0..2 {
        let off = 3 * n2 + r * n2;
        for l in 0..n2 {
            for l2 in 0..n2 {
                g[(off + l, off + l2)] = mass[(l, l2)] + gxx[(l, l2)] + gyy[(l, l2)];
            }
        }
    }
    let off = 5 * n2;
    for l in 0..n0 {
        for l2 in 0..n0 {
            g[(off + l, off + l2)] = mass[(l, l2)];
        }
    }
    g
}

/// Matrix of b(trial, test) on element `t`, before orientation signs.
pub fn element_b(
    mesh: &Mesh,
    t: usize,
    layout: &SpaceLayout,
    tables: &ReferenceTables,
    lame: &LameParams,
) -> DMatrix<f64> {
    let geo = ElementGeometry::new(mesh, t);
    let k = tables.k;
    let n2 = tables.n_test_scalar();
    let n0 = tables.n_trial_scalar();
    let nu = tables.u_basis.dim();
    let s = geo.basis_scale();
    let mut b = DMatrix::<f64>::zeros(tables.n_test(), layout.trial_local());
    let (tau0, v0, q0) = (0, 3 * n2, 5 * n2);
    let (sig0, u0) = (0, 4 * n0);

    // (Aσ, τ) coefficients: A(e_rs) : E_c
    let mut a_table = [[0.0; 3]; 4];
    for (c4, row) in a_table.iter_mut().enumerate() {
        let a = compliance_apply(&matrix_unit(c4), lame);
        for (c, v) in row.iter_mut().enumerate() {
            *v = a.component_mul(&symmetric_unit(c)).sum();
        }
    }
    let skew = skew_unit();

    for p in 0..tables.volume.len() {
        let w = tables.volume.weights[p] * geo.det;
        let grads: Vec<Vector2<f64>> = (0..n2)
            .map(|l| geo.push_gradient([tables.test_grad[0][(l, p)], tables.test_grad[1][(l, p)]]) * s)
            .collect();
        for l in 0..n2 {
            let phi = tables.test_val[(l, p)] * s;
            let g = grads[l];
            for i in 0..n0 {
                let psi = tables.trial_val[(i, p)] * s;
                for c4 in 0..4 {
                    let col = sig0 + c4 * n0 + i;
                    for c in 0..3 {
                        b[(tau0 + c * n2 + l, col)] += w * a_table[c4][c] * psi * phi;
                    }
                    // (σ, ∇v): σ_rs ∂_s v_r
                    let (r, sdir) = (c4 / 2, c4 % 2);
                    b[(v0 + r * n2 + l, col)] += w * psi * g[sdir];
                }
            }
            for c in 0..3 {
                let div = symmetric_unit(c) * g;
                for i in 0..nu {
                    let psi = tables.u_val[(i, p)] * s;
                    for r in 0..2 {
                        b[(tau0 + c * n2 + l, u0 + r * nu + i)] += w * psi * div[r];
                    }
                }
            }
        }
        for l in 0..n0 {
            let phi = tables.trial_val[(l, p)] * s;
            for i in 0..n0 {
                let psi = tables.trial_val[(i, p)] * s;
                for c4 in 0..4 {
                    let (r, sdir) = (c4 / 2, c4 % 2);
                    b[(q0 + l, sig0 + c4 * n0 + i)] += w * skew[(r, sdir)] * psi * phi;
                }
            }
        }
    }

    // trace terms −⟨û, τν⟩ − ⟨σ̂ₙ, v⟩ along each edge, in the edge's global parameter
    let tri = mesh.triangles()[t].vertices;
    for (le, &e) in mesh.triangle_edges(t).iter().enumerate() {
        let edge = &mesh.edges()[e];
        let [lo, hi] = edge.vertices;
        let (plo, phi_) = (mesh.vertices()[lo], mesh.vertices()[hi]);
        let len = (phi_ - plo).norm();
        let n = mesh.outward_normal(t, le);
        let lo_local = tri.iter().position(|&v| v == lo).unwrap();
        let hi_local = tri.iter().position(|&v| v == hi).unwrap();
        for (q, (&sp, &wq)) in tables.edge.points.iter().zip(&tables.edge.weights).enumerate() {
            let w = wq * len;
            let x = plo + (phi_ - plo) * sp;
            let phi_vals = tables.test_basis.eval(geo.to_reference(&x));
            let modes = &tables.edge_modes[q];
            let nodal = &tables.edge_nodal[q];
            for l in 0..n2 {
                let phi = phi_vals[l] * s;
                for c in 0..3 {
                    let tn = symmetric_unit(c) * n;
                    for (m, &nm) in nodal.iter().enumerate() {
                        for r in 0..2 {
                            let col = if m == 0 {
                                layout.uhat_vertex_local(lo_local, r)
                            } else if m == k + 1 {
                                layout.uhat_vertex_local(hi_local, r)
                            } else {
                                layout.uhat_edge_local(le, m - 1, r)
                            };
                            b[(tau0 + c * n2 + l, col)] -= w * nm * tn[r] * phi;
                        }
                    }
                }
                for (m, &mu) in modes.iter().enumerate() {
                    for r in 0..2 {
                        let col = layout.flux_local_index(le, r, m);
                        b[(v0 + r * n2 + l, col)] -= w * mu * phi;
                    }
                }
            }
        }
    }
    b
}

/// Load (f, v) on element `t`; τ and q rows are zero.
pub fn element_load(geo: &ElementGeometry, tables: &ReferenceTables, problem: &Problem) -> DVector<f64> {
    let n2 = tables.n_test_scalar();
    let s = geo.basis_scale();
    let mut l = DVector::zeros(tables.n_test());
    for (p, (&wq, pt)) in tables.load.weights.iter().zip(&tables.load.points).enumerate() {
        let w = wq * geo.det;
        let f = problem.body_force_at(&geo.to_physical(*pt));
        for i in 0..n2 {
            let phi = tables.load_val[(i, p)] * s;
            l[3 * n2 + i] += w * f.x * phi;
            l[4 * n2 + i] += w * f.y * phi;
        }
    }
    l
}

pub fn element_system(
    mesh: &Mesh,
    t: usize,
    layout: &SpaceLayout,
    tables: &ReferenceTables,
    problem: &Problem,
) -> ElementSystem {
    let geo = ElementGeometry::new(mesh, t);
    ElementSystem {
        b: element_b(mesh, t, layout, tables, &problem.lame),
        gram: element_gram(&geo, tables),
        load: element_load(&geo, tables, problem),
    }
}

/// Local normal equations S_e = Bᵀ G⁻¹ B and f_e = Bᵀ G⁻¹ l via the
/// Cholesky factor G = L Lᵀ.
#[derive(Debug, Clone)]
pub struct CondensedElement {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// L⁻¹ B and L⁻¹ l, reused for residual recovery.
    pub whitened_b: DMatrix<f64>,
    pub whitened_load: DVector<f64>,
    pub factor: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

pub fn condense(es: &ElementSystem, element: usize) -> Result<CondensedElement> {
    let factor = nalgebra::Cholesky::new(es.gram.clone()).ok_or(Error::GramNotSpd { element })?;
    let l = factor.l();
    let whitened_b = l
        .solve_lower_triangular(&es.b)
        .ok_or(Error::GramNotSpd { element })?;
    let whitened_load = l
        .solve_lower_triangular(&es.load)
        .ok_or(Error::GramNotSpd { element })?;
    let matrix = whitened_b.tr_mul(&whitened_b);
    let rhs = whitened_b.tr_mul(&whitened_load);
    Ok(CondensedElement {
        matrix,
        rhs,
        whitened_b,
        whitened_load,
        factor,
    })
}

impl CondensedElement {
    /// Riesz representative ε_e = G⁻¹(l − B x) of the local residual and its
    /// V-norm.
    pub fn residual(&self, local: &DVector<f64>) -> (DVector<f64>, f64) {
        let z = &self.whitened_load - &self.whitened_b * local;
        let eta = z.norm();
        let eps = self
            .factor
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .expect("factor is non-singular");
        (eps, eta)
    }
}
