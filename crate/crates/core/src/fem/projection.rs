//! Elementwise polynomial fields and L² projections onto them.

use nalgebra::{DVector, Vector2};

use super::basis::ScalarBasis;
use super::quadrature::{quad_rule, MAX_DEGREE};
use super::ElementGeometry;
use crate::mesh::{Mesh, Point2};

/// Broken polynomial field of `components` scalar components. Coefficients
/// refer to the L²(T)-orthonormal modal basis of each element and are stored
/// component-major (`c * dim + i`).
#[derive(Debug, Clone)]
pub struct PiecewisePolynomial {
    pub degree: usize,
    pub components: usize,
    pub coeffs: Vec<DVector<f64>>,
}

impl PiecewisePolynomial {
    pub fn zeros(mesh: &Mesh, degree: usize, components: usize) -> Self {
        let n = ScalarBasis::new(degree).dim() * components;
        PiecewisePolynomial {
            degree,
            components,
            coeffs: vec![DVector::zeros(n); mesh.num_triangles()],
        }
    }

    /// Values of all components at a reference point of element `t`.
    pub fn eval_ref(&self, basis: &ScalarBasis, geo: &ElementGeometry, t: usize, p: [f64; 2]) -> Vec<f64> {
        debug_assert_eq!(basis.degree(), self.degree);
        let phi = basis.eval(p);
        let s = geo.basis_scale();
        let dim = basis.dim();
        (0..self.components)
            .map(|c| (0..dim).map(|i| self.coeffs[t][c * dim + i] * phi[i] * s).sum())
            .collect()
    }

    /// L² distance to `exact` using a rule of degree `quad_degree`.
    pub fn l2_distance<const N: usize>(
        &self,
        mesh: &Mesh,
        quad_degree: usize,
        exact: impl Fn(&Point2) -> [f64; N] + Sync,
    ) -> f64 {
        assert_eq!(N, self.components);
        let basis = ScalarBasis::new(self.degree);
        let q = quad_rule(quad_degree.min(MAX_DEGREE)).expect("capped degree");
        let phi = basis.values(&q.points);
        let dim = basis.dim();
        let mut total = 0.0;
        for t in 0..mesh.num_triangles() {
            let geo = ElementGeometry::new(mesh, t);
            let s = geo.basis_scale();
            for (p, (&w, pt)) in q.weights.iter().zip(&q.points).enumerate() {
                let x = geo.to_physical(*pt);
                let ex = exact(&x);
                for (c, e) in ex.iter().enumerate() {
                    let uh: f64 = (0..dim).map(|i| self.coeffs[t][c * dim + i] * phi[(i, p)]).sum::<f64>() * s;
                    total += w * geo.det * (uh - e).powi(2);
                }
            }
        }
        total.sqrt()
    }

    /// L² norm of the difference of two fields on the same mesh; exact
    /// through orthonormality.
    pub fn l2_distance_to(&self, other: &PiecewisePolynomial) -> f64 {
        assert_eq!(self.components, other.components);
        let degree = self.degree.max(other.degree);
        let (a, b) = (self.raised_to(degree), other.raised_to(degree));
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| (x - y).norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Same field expressed in a higher-degree hierarchical basis.
    pub fn raised_to(&self, degree: usize) -> PiecewisePolynomial {
        assert!(degree >= self.degree);
        let (lo, hi) = (super::dim_p(self.degree), super::dim_p(degree));
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let mut out = DVector::zeros(hi * self.components);
                for comp in 0..self.components {
                    for i in 0..lo {
                        out[comp * hi + i] = c[comp * lo + i];
                    }
                }
                out
            })
            .collect();
        PiecewisePolynomial {
            degree,
            components: self.components,
            coeffs,
        }
    }
}

fn project<const N: usize>(
    f: impl Fn(&Point2) -> [f64; N],
    k: usize,
    mesh: &Mesh,
) -> PiecewisePolynomial {
    let basis = ScalarBasis::new(k);
    let q = quad_rule((2 * (k + 2) + 6).min(MAX_DEGREE)).expect("capped degree");
    let phi = basis.values(&q.points);
    let dim = basis.dim();
    let coeffs = (0..mesh.num_triangles())
        .map(|t| {
            let geo = ElementGeometry::new(mesh, t);
            let s = geo.basis_scale();
            let mut c = DVector::zeros(N * dim);
            for (p, (&w, pt)) in q.weights.iter().zip(&q.points).enumerate() {
                let val = f(&geo.to_physical(*pt));
                for comp in 0..N {
                    for i in 0..dim {
                        c[comp * dim + i] += w * geo.det * val[comp] * phi[(i, p)] * s;
                    }
                }
            }
            c
        })
        .collect();
    PiecewisePolynomial {
        degree: k,
        components: N,
        coeffs,
    }
}

/// Elementwise L² projection Π_k of a scalar field.
pub fn l2_project(f: impl Fn(&Point2) -> f64, k: usize, mesh: &Mesh) -> PiecewisePolynomial {
    project(|x| [f(x)], k, mesh)
}

/// Elementwise L² projection Π_k of a vector field, componentwise.
pub fn l2_project_vector(
    f: impl Fn(&Point2) -> Vector2<f64>,
    k: usize,
    mesh: &Mesh,
) -> PiecewisePolynomial {
    project(
        |x| {
            let v = f(x);
            [v.x, v.y]
        },
        k,
        mesh,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{unit_square_mesh, Triangle};
    use rand::{Rng, SeedableRng};
    use std::collections::HashMap;

    fn reference_mesh() -> Mesh {
        let v = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let t = vec![Triangle {
            vertices: [0, 1, 2],
            refinement_edge: 0,
            parent: None,
        }];
        Mesh::from_parts(v, t, &HashMap::new()).unwrap()
    }

    #[test]
    fn x_squared_onto_constants() {
        let m = reference_mesh();
        let p = l2_project(|x| x.x * x.x, 0, &m);
        let geo = ElementGeometry::new(&m, 0);
        let v = p.eval_ref(&ScalarBasis::new(0), &geo, 0, [0.2, 0.2]);
        assert!((v[0] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn reproduces_polynomials() {
        let m = unit_square_mesh(3);
        let f = |x: &Point2| 1.0 + 2.0 * x.x - x.y + 3.0 * x.x * x.y - x.y * x.y;
        let p = l2_project(f, 2, &m);
        assert!(p.l2_distance(&m, 8, |x| [f(x)]) < 1e-12);
    }

    #[test]
    fn orthogonality_residual() {
        let m = unit_square_mesh(2);
        let f = |x: &Point2| (3.0 * x.x).sin() * (2.0 * x.y).exp();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for k in 0..4 {
            let proj = l2_project(f, k, &m);
            let basis = ScalarBasis::new(k);
            let q = quad_rule(2 * (k + 2) + 6).unwrap();
            for t in 0..m.num_triangles() {
                let geo = ElementGeometry::new(&m, t);
                let coeffs: Vec<f64> = (0..basis.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let (mut inner, mut nf, mut np) = (0.0, 0.0, 0.0);
                for (&w, pt) in q.weights.iter().zip(&q.points) {
                    let phi = basis.eval(*pt);
                    let pval: f64 = coeffs.iter().zip(&phi).map(|(c, v)| c * v).sum();
                    let fx = f(&geo.to_physical(*pt));
                    let fh = proj.eval_ref(&basis, &geo, t, *pt)[0];
                    inner += w * geo.det * (fx - fh) * pval;
                    nf += w * geo.det * fx * fx;
                    np += w * geo.det * pval * pval;
                }
                assert!(inner.abs() <= 1e-10 * (nf * np).sqrt(), "k={k} t={t}");
            }
        }
    }
}
