//! Polynomial bases on the reference triangle and on edges.
//!
//! Volume bases are L²-orthonormal modal bases obtained by (twice repeated)
//! modified Gram-Schmidt on graded monomials centred at the reference
//! centroid. The construction is hierarchical: the first `dim P^p` functions
//! of a degree-`k` basis span `P^p` for every `p ≤ k`.

use nalgebra::DMatrix;

use super::quadrature::{quad_rule, LineRule};

pub fn dim_p(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

#[derive(Debug, Clone)]
pub struct ScalarBasis {
    degree: usize,
    exponents: Vec<(i32, i32)>,
    /// Row `i` holds the monomial coefficients of basis function `i`.
    coeffs: DMatrix<f64>,
}

const CENTER: f64 = 1.0 / 3.0;

impl ScalarBasis {
    pub fn new(degree: usize) -> Self {
        let exponents: Vec<(i32, i32)> = (0..=degree as i32)
            .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
            .collect();
        let n = exponents.len();
        let q = quad_rule(2 * degree).expect("basis degree within quadrature range");
        let sw: Vec<f64> = q.weights.iter().map(|w| w.sqrt()).collect();
        // columns: weighted monomial samples
        let samples = DMatrix::from_fn(q.len(), n, |p, m| {
            let (a, b) = exponents[m];
            let [x, y] = q.points[p];
            sw[p] * (x - CENTER).powi(a) * (y - CENTER).powi(b)
        });

        let mut coeffs = DMatrix::<f64>::zeros(n, n);
        let mut ortho = DMatrix::<f64>::zeros(q.len(), n);
        for i in 0..n {
            let mut v = samples.column(i).into_owned();
            let mut c = nalgebra::DVector::<f64>::zeros(n);
            c[i] = 1.0;
            for _ in 0..2 {
                for j in 0..i {
                    let r = ortho.column(j).dot(&v);
                    v -= ortho.column(j) * r;
                    c -= coeffs.row(j).transpose() * r;
                }
            }
            let norm = v.norm();
            ortho.set_column(i, &(v / norm));
            coeffs.set_row(i, &(c / norm).transpose());
        }
        ScalarBasis {
            degree,
            exponents,
            coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn monomials(&self, p: [f64; 2]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (x, y) = (p[0] - CENTER, p[1] - CENTER);
        let mut val = Vec::with_capacity(self.dim());
        let mut dx = Vec::with_capacity(self.dim());
        let mut dy = Vec::with_capacity(self.dim());
        for &(a, b) in &self.exponents {
            val.push(x.powi(a) * y.powi(b));
            dx.push(if a > 0 { a as f64 * x.powi(a - 1) * y.powi(b) } else { 0.0 });
            dy.push(if b > 0 { b as f64 * x.powi(a) * y.powi(b - 1) } else { 0.0 });
        }
        (val, dx, dy)
    }

    /// Basis values at a reference point.
    pub fn eval(&self, p: [f64; 2]) -> Vec<f64> {
        let (m, _, _) = self.monomials(p);
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.coeffs[(i, j)] * m[j]).sum())
            .collect()
    }

    /// Reference-coordinate gradients at a reference point.
    pub fn eval_grad(&self, p: [f64; 2]) -> Vec<[f64; 2]> {
        let (_, mx, my) = self.monomials(p);
        (0..self.dim())
            .map(|i| {
                let mut g = [0.0; 2];
                for j in 0..self.dim() {
                    g[0] += self.coeffs[(i, j)] * mx[j];
                    g[1] += self.coeffs[(i, j)] * my[j];
                }
                g
            })
            .collect()
    }

    /// Values as a (basis function × point) matrix.
    pub fn values(&self, pts: &[[f64; 2]]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim(), pts.len());
        for (q, &p) in pts.iter().enumerate() {
            for (i, v) in self.eval(p).into_iter().enumerate() {
                out[(i, q)] = v;
            }
        }
        out
    }

    /// Reference gradients as a pair of (basis function × point) matrices.
    pub fn gradients(&self, pts: &[[f64; 2]]) -> [DMatrix<f64>; 2] {
        let mut gx = DMatrix::zeros(self.dim(), pts.len());
        let mut gy = DMatrix::zeros(self.dim(), pts.len());
        for (q, &p) in pts.iter().enumerate() {
            for (i, g) in self.eval_grad(p).into_iter().enumerate() {
                gx[(i, q)] = g[0];
                gy[(i, q)] = g[1];
            }
        }
        [gx, gy]
    }
}

/// Legendre polynomials on [0, 1], orthonormal in L²(0, 1).
pub fn edge_legendre(k: usize, s: f64) -> Vec<f64> {
    let x = 2.0 * s - 1.0;
    let mut p = Vec::with_capacity(k + 1);
    p.push(1.0);
    if k >= 1 {
        p.push(x);
    }
    for n in 2..=k {
        let nf = n as f64;
        let next = ((2.0 * nf - 1.0) * x * p[n - 1] - (nf - 1.0) * p[n - 2]) / nf;
        p.push(next);
    }
    p.iter()
        .enumerate()
        .map(|(n, v)| v * (2.0 * n as f64 + 1.0).sqrt())
        .collect()
}

/// Nodal Lagrange basis of degree `p ≥ 1` on [0, 1] at Gauss-Lobatto nodes.
/// Node 0 is s = 0, node `p` is s = 1, interior nodes are increasing.
#[derive(Debug, Clone)]
pub struct LobattoNodal {
    pub nodes: Vec<f64>,
}

impl LobattoNodal {
    pub fn new(p: usize) -> Self {
        assert!(p >= 1);
        let mut nodes = vec![0.0];
        // interior nodes: roots of P'_p on (−1, 1)
        let mut interior = Vec::new();
        for i in 1..p {
            let mut x = -(std::f64::consts::PI * i as f64 / p as f64).cos();
            for _ in 0..100 {
                let (d1, d2) = legendre_derivatives(p, x);
                let dx = d1 / d2;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            interior.push(0.5 * (x + 1.0));
        }
        interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.extend(interior);
        nodes.push(1.0);
        LobattoNodal { nodes }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        (0..self.nodes.len())
            .map(|i| {
                self.nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &xj)| (s - xj) / (self.nodes[i] - xj))
                    .product()
            })
            .collect()
    }
}

/// First and second derivative of the Legendre polynomial P_p at x in (−1, 1).
fn legendre_derivatives(p: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=p {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let pf = p as f64;
    let d1 = pf * (x * p1 - p0) / (x * x - 1.0);
    let d2 = (2.0 * x * d1 - pf * (pf + 1.0) * p1) / (1.0 - x * x);
    (d1, d2)
}

/// Gauss rule on an edge parameter s ∈ [0, 1] suitable for trace pairings
/// of degree-`k` problems.
pub fn edge_rule(k: usize) -> LineRule {
    // ⌈(2k+4)/2⌉ + 1 points
    LineRule::gauss((2 * k + 4).div_ceil(2) + 1)
}
