//! Rigid-body-motion projection and the element-local Neumann
//! reconstruction of a displacement of one degree higher.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::quadrature::{quad_rule, MAX_DEGREE};
use crate::fem::{ElementGeometry, PiecewisePolynomial, ScalarBasis};
use crate::material::{compliance_apply, LameParams};
use crate::mesh::{Mesh, Point2};

/// Centroid-centred basis r₁ = (1,0), r₂ = (0,1), r₃ = (−(y−ȳ), x−x̄) of
/// the rigid motions on one element.
#[derive(Debug, Clone, Copy)]
pub struct RigidBodyBasis {
    pub centroid: Point2,
}

impl RigidBodyBasis {
    pub fn new(mesh: &Mesh, t: usize) -> Self {
        RigidBodyBasis {
            centroid: mesh.centroid(t),
        }
    }

    pub fn eval(&self, i: usize, x: &Point2) -> Vector2<f64> {
        let d = x - self.centroid;
        match i {
            0 => Vector2::new(1.0, 0.0),
            1 => Vector2::new(0.0, 1.0),
            2 => Vector2::new(-d.y, d.x),
            _ => panic!("rigid motion index {i} out of range"),
        }
    }

    pub fn combine(&self, c: &[f64; 3], x: &Point2) -> Vector2<f64> {
        (0..3).map(|i| self.eval(i, x) * c[i]).sum()
    }

    /// Coefficients (a, b, c) of the same motion written as (a − c y, b + c x).
    pub fn uncentered(&self, c: &[f64; 3]) -> [f64; 3] {
        [
            c[0] + c[2] * self.centroid.y,
            c[1] - c[2] * self.centroid.x,
            c[2],
        ]
    }
}

/// L²(T) projection of `v` onto the rigid motions, as coefficients in the
/// centred basis. The basis Gram matrix is diagonal.
pub fn rm_project(mesh: &Mesh, t: usize, v: impl Fn(&Point2) -> Vector2<f64>) -> [f64; 3] {
    let rm = RigidBodyBasis::new(mesh, t);
    let geo = ElementGeometry::new(mesh, t);
    let q = quad_rule(MAX_DEGREE).expect("supported degree");
    let mut num = [0.0; 3];
    let mut den = [0.0; 3];
    for (&w, pt) in q.weights.iter().zip(&q.points) {
        let x = geo.to_physical(*pt);
        let val = v(&x);
        for i in 0..3 {
            let r = rm.eval(i, &x);
            num[i] += w * geo.det * val.dot(&r);
            den[i] += w * geo.det * r.norm_squared();
        }
    }
    [num[0] / den[0], num[1] / den[1], num[2] / den[2]]
}

/// Solves, element by element, for ũ ∈ P^{k+1}(T)² with
/// Π_rm ũ = Π_rm u_h and (ε ũ, ε w)_T = (A σ_h, ε w)_T for w ⊥ RM(T).
pub fn postprocess(
    mesh: &Mesh,
    sigma: &PiecewisePolynomial,
    u: &PiecewisePolynomial,
    k: usize,
    lame: &LameParams,
) -> Result<PiecewisePolynomial> {
    let degree = k + 1;
    let basis = ScalarBasis::new(degree);
    let sigma_basis = ScalarBasis::new(sigma.degree);
    let u_basis = ScalarBasis::new(u.degree);
    let q = quad_rule((2 * degree + 4).min(MAX_DEGREE)).expect("supported degree");
    let vals = basis.values(&q.points);
    let grads = basis.gradients(&q.points);
    let sigma_vals = sigma_basis.values(&q.points);
    let u_vals = u_basis.values(&q.points);
    let n = basis.dim();
    let (ns, nu) = (sigma_basis.dim(), u_basis.dim());

    let coeffs = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| -> Result<DVector<f64>> {
            let geo = ElementGeometry::new(mesh, t);
            let rm = RigidBodyBasis::new(mesh, t);
            let s = geo.basis_scale();
            let size = 2 * n + 3;
            let mut m = DMatrix::<f64>::zeros(size, size);
            let mut rhs = DVector::<f64>::zeros(size);
            for p in 0..q.len() {
                let w = q.weights[p] * geo.det;
                let x = geo.to_physical(q.points[p]);
                let mut sh = Matrix2::zeros();
                for c in 0..4 {
                    sh[(c / 2, c % 2)] = (0..ns).map(|i| sigma.coeffs[t][c * ns + i] * sigma_vals[(i, p)]).sum::<f64>() * s;
                }
                let uh = Vector2::new(
                    (0..nu).map(|i| u.coeffs[t][i] * u_vals[(i, p)]).sum::<f64>() * s,
                    (0..nu).map(|i| u.coeffs[t][nu + i] * u_vals[(i, p)]).sum::<f64>() * s,
                );
                let a_sigma = compliance_apply(&sh, lame);
                // ε(e_r ψ) has entries ∂_s ψ / 2 off the diagonal, ∂_r ψ on it
                let strains: Vec<Matrix2<f64>> = (0..2 * n)
                    .map(|a| {
                        let (r, i) = (a / n, a % n);
                        let g = geo.push_gradient([grads[0][(i, p)], grads[1][(i, p)]]) * s;
                        let mut grad = Matrix2::zeros();
                        grad[(r, 0)] = g.x;
                        grad[(r, 1)] = g.y;
                        (grad + grad.transpose()) * 0.5
                    })
                    .collect();
                for a in 0..2 * n {
                    for b in a..2 * n {
                        let v = w * strains[a].dot(&strains[b]);
                        m[(a, b)] += v;
                        if a != b {
                            m[(b, a)] += v;
                        }
                    }
                    rhs[a] += w * a_sigma.dot(&strains[a]);
                    let (r, i) = (a / n, a % n);
                    let phi = vals[(i, p)] * s;
                    for ri in 0..3 {
                        let c = w * phi * rm.eval(ri, &x)[r];
                        m[(2 * n + ri, a)] += c;
                        m[(a, 2 * n + ri)] += c;
                    }
                }
                for ri in 0..3 {
                    rhs[2 * n + ri] += w * uh.dot(&rm.eval(ri, &x));
                }
            }
            let lu = m.full_piv_lu();
            let sol = lu.solve(&rhs).ok_or(Error::SingularSaddle { element: t })?;
            Ok(sol.rows(0, 2 * n).into_owned())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PiecewisePolynomial {
        degree,
        components: 2,
        coeffs,
    })
}
