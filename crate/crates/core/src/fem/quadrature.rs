//! Gauss rules on the unit interval and collapsed (Duffy) product rules on
//! the reference triangle `(0,0), (1,0), (0,1)`.

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 20;

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
#[derive(Debug, Clone)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    pub fn gauss(n: usize) -> Self {
        assert!(n >= 1);
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            points[i] = 0.5 * (1.0 - x);
            points[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        LineRule { points, weights }
    }

    /// Gauss rule integrating polynomials of `degree` exactly.
    pub fn for_degree(degree: usize) -> Self {
        Self::gauss(degree / 2 + 1)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature on the reference triangle. Weights refer to the reference
/// measure and sum to 1/2.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Reference coordinates (ξ, η).
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    /// Barycentric coordinates `(1 − ξ − η, ξ, η)` of every point.
    pub fn barycentric(&self) -> Vec<[f64; 3]> {
        self.points
            .iter()
            .map(|&[x, y]| [1.0 - x - y, x, y])
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Rule exact for all polynomials of total degree `degree` on the reference
/// triangle.
pub fn quad_rule(degree: usize) -> Result<QuadratureRule> {
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedQuadrature(degree));
    }
    // x = a (1 − b), y = b with Jacobian (1 − b): degree+1 in b.
    let n = (degree + 2).div_ceil(2);
    let line = LineRule::gauss(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&b, &wb) in line.points.iter().zip(&line.weights) {
        for (&a, &wa) in line.points.iter().zip(&line.weights) {
            points.push([a * (1.0 - b), b]);
            weights.push(wa * wb * (1.0 - b));
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        exactness_degree: degree,
    })
}
