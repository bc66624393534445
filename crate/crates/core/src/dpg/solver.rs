use faer::linalg::solvers::Solve;
use faer::sparse::SparseColMat;
use faer::{Mat, Side};
use nalgebra::DVector;

use super::assembly::{local_coefficients, GlobalSystem};
use crate::error::{Error, Result};
use crate::fem::{dim_p, PiecewisePolynomial};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Cholesky,
    Cg,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub kind: SolverKind,
    /// Relative residual target.
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            kind: SolverKind::Cholesky,
            tol: 1e-10,
        }
    }
}

/// Discrete solution split into its fields, plus the residual
/// representative and error indicators once estimated.
#[derive(Debug, Clone)]
pub struct SolutionFields {
    pub k: usize,
    pub j: usize,
    /// Global free coefficient vector of the solved system.
    pub coefficients: DVector<f64>,
    /// Stress with component `2r + s` holding σ_rs.
    pub sigma: PiecewisePolynomial,
    pub u: PiecewisePolynomial,
    pub flux: Vec<f64>,
    pub uhat: Vec<f64>,
    /// Relative residual ‖Sx − f‖ / ‖f‖ of the linear solve.
    pub solver_residual: f64,
    /// Test-space coefficients of ε_h per element, empty until estimated.
    pub residual: Vec<DVector<f64>>,
    pub indicators: Vec<f64>,
    pub estimate: f64,
}

/// y = A x for a matrix holding both triangles.
fn spmv(a: &SparseColMat<usize, f64>, x: &[f64], y: &mut [f64]) {
    y.iter_mut().for_each(|v| *v = 0.0);
    let (cp, ri, val) = (a.col_ptr(), a.row_idx(), a.val());
    for (c, &xc) in x.iter().enumerate() {
        for p in cp[c]..cp[c + 1] {
            y[ri[p]] += val[p] * xc;
        }
    }
}

fn relative_residual(a: &SparseColMat<usize, f64>, x: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut r = vec![0.0; b.len()];
    spmv(a, x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rel = if bn > 0.0 { rn / bn } else { rn };
    (r, rel)
}

fn cholesky(a: &SparseColMat<usize, f64>, b: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
    let n = b.len();
    let llt = a
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    llt.solve_in_place(rhs.as_mut());
    let mut x: Vec<f64> = (0..n).map(|i| rhs[(i, 0)]).collect();
    let (mut r, mut rel) = relative_residual(a, &x, b);
    // a few steps of iterative refinement for ill-conditioned systems
    for _ in 0..3 {
        if rel <= tol {
            break;
        }
        let mut corr = Mat::<f64>::from_fn(n, 1, |i, _| r[i]);
        llt.solve_in_place(corr.as_mut());
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += corr[(i, 0)];
        }
        (r, rel) = relative_residual(a, &x, b);
    }
    Ok((x, rel))
}

/// Jacobi-preconditioned conjugate gradients.
fn conjugate_gradient(a: &SparseColMat<usize, f64>, b: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
    let n = b.len();
    let mut diag = vec![1.0; n];
    let (cp, ri, val) = (a.col_ptr(), a.row_idx(), a.val());
    for c in 0..n {
        for p in cp[c]..cp[c + 1] {
            if ri[p] == c && val[p] > 0.0 {
                diag[c] = val[p];
            }
        }
    }
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let bn = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bn == 0.0 {
        return Ok((x, 0.0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let max_iter = 20 * n.max(100);
    for it in 0..max_iter {
        spmv(a, &p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = dot(&r, &r).sqrt() / bn;
        if rel <= tol {
            // recompute the true residual to guard against drift
            let (_, true_rel) = relative_residual(a, &x, b);
            if true_rel <= 10.0 * tol {
                return Ok((x, true_rel));
            }
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        if it + 1 == max_iter {
            return Err(Error::NoConvergence {
                iterations: max_iter,
                residual: rel,
            });
        }
    }
    unreachable!()
}

/// Solves the sparse symmetric positive definite system `A x = b`.
pub fn solve_linear(a: &SparseColMat<usize, f64>, b: &[f64], options: &SolverOptions) -> Result<(Vec<f64>, f64)> {
    if b.is_empty() {
        return Ok((Vec::new(), 0.0));
    }
    match options.kind {
        SolverKind::Cholesky => cholesky(a, b, options.tol),
        SolverKind::Cg => conjugate_gradient(a, b, options.tol),
    }
}

/// Solves the condensed system and unpacks the fields.
pub fn solve(system: &GlobalSystem, mesh: &Mesh, options: &SolverOptions) -> Result<SolutionFields> {
    let (x, solver_residual) = solve_linear(&system.matrix, system.rhs.as_slice(), options)?;
    let x = DVector::from_vec(x);
    let layout = &system.layout;
    let (k, j) = (layout.k, layout.j);
    let n_sigma = 4 * dim_p(k);
    let n_u = 2 * dim_p(k + j);
    let mut sigma = PiecewisePolynomial::zeros(mesh, k, 4);
    let mut u = PiecewisePolynomial::zeros(mesh, k + j, 2);
    for t in 0..mesh.num_triangles() {
        let local = local_coefficients(layout, t, &x, &system.dirichlet_values);
        sigma.coeffs[t] = local.rows(0, n_sigma).into_owned();
        u.coeffs[t] = local.rows(n_sigma, n_u).into_owned();
    }
    Ok(SolutionFields {
        k,
        j,
        flux: x.as_slice()[layout.flux.clone()].to_vec(),
        uhat: x.as_slice()[layout.uhat.clone()].to_vec(),
        coefficients: x,
        sigma,
        u,
        solver_residual,
        residual: Vec::new(),
        indicators: Vec::new(),
        estimate: f64::NAN,
    })
}
