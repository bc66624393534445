//! Isotropic linear elasticity in two dimensions and the benchmark problems.

mod problems;

use nalgebra::Matrix2;

use crate::error::{Error, Result};

pub use problems::{problem_by_name, problem_locking_square, problem_lshape, problem_smooth_square, Problem, VectorField, MatrixField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParams {
    pub lambda: f64,
    pub mu: f64,
}

impl LameParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::Material(format!("mu must be positive, got {mu}")));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Material(format!("lambda must be finite and non-negative, got {lambda}")));
        }
        Ok(LameParams { lambda, mu })
    }

    /// Lamé parameters from Young's modulus and Poisson ratio.
    pub fn from_young_poisson(e: f64, nu: f64) -> Result<Self> {
        if !(e > 0.0) {
            return Err(Error::Material(format!("Young's modulus must be positive, got {e}")));
        }
        if !(0.0..0.5).contains(&nu) {
            return Err(Error::Material(format!("Poisson ratio must lie in [0, 0.5), got {nu}")));
        }
        let lambda = e * nu / ((1.0 - 2.0 * nu) * (1.0 + nu));
        let mu = e / (2.0 * (1.0 + nu));
        LameParams::new(lambda, mu)
    }

    /// Coefficient of tr(τ) I in the compliance tensor, written so that it
    /// stays bounded as λ → ∞.
    fn trace_coefficient(&self) -> f64 {
        // λ / (2μ (2μ + 2λ)) = 1 / (2μ (2μ/λ + 2))
        if self.lambda == 0.0 {
            0.0
        } else {
            1.0 / (2.0 * self.mu * (2.0 * self.mu / self.lambda + 2.0))
        }
    }
}

pub fn sym(t: &Matrix2<f64>) -> Matrix2<f64> {
    (t + t.transpose()) * 0.5
}

pub fn skew(t: &Matrix2<f64>) -> Matrix2<f64> {
    (t - t.transpose()) * 0.5
}

/// Compliance A(sym τ) + as(τ), with A τ = τ/(2μ) − λ/(2μ(2μ+2λ)) tr(τ) I.
pub fn compliance_apply(tau: &Matrix2<f64>, p: &LameParams) -> Matrix2<f64> {
    let s = sym(tau);
    s / (2.0 * p.mu) - Matrix2::identity() * (p.trace_coefficient() * s.trace()) + skew(tau)
}

/// Stiffness C ε = 2μ ε + λ tr(ε) I (input symmetrised).
pub fn stiffness_apply(eps: &Matrix2<f64>, p: &LameParams) -> Matrix2<f64> {
    let s = sym(eps);
    s * (2.0 * p.mu) + Matrix2::identity() * (p.lambda * s.trace())
}

/// Lamé parameters from Young's modulus and Poisson ratio; ν ≥ 0.5 is rejected.
pub fn lame_from_e_nu(e: f64, nu: f64) -> Result<LameParams> {
    LameParams::from_young_poisson(e, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> LameParams {
        LameParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn compliance_examples() {
        let a = compliance_apply(&Matrix2::identity(), &unit());
        assert!((a - Matrix2::identity() * 0.25).abs().max() < 1e-15);
        let rot = Matrix2::new(0.0, 1.0, -1.0, 0.0);
        assert_eq!(compliance_apply(&rot, &unit()), rot);
        let d = compliance_apply(&Matrix2::new(3.0, 0.0, 0.0, 1.0), &unit());
        assert!((d - Matrix2::new(1.0, 0.0, 0.0, 0.0)).abs().max() < 1e-15);
    }

    #[test]
    fn stiffness_examples() {
        let c = stiffness_apply(&Matrix2::new(1.0, 0.0, 0.0, 0.0), &unit());
        assert_eq!(c, Matrix2::new(3.0, 0.0, 0.0, 1.0));
        assert_eq!(stiffness_apply(&Matrix2::zeros(), &unit()), Matrix2::zeros());
    }

    #[test]
    fn young_poisson_conversion() {
        let p = lame_from_e_nu(1e5, 0.3).unwrap();
        assert!((p.mu - 1e5 / 2.6).abs() < 1e-9);
        assert!((p.lambda - 3e4 / 0.52).abs() < 1e-9);
        let p0 = lame_from_e_nu(2.0, 0.0).unwrap();
        assert_eq!((p0.lambda, p0.mu), (0.0, 1.0));
        assert!(lame_from_e_nu(1.0, 0.5).is_err());
        assert!(lame_from_e_nu(1.0, 0.7).is_err());
        let l1 = lame_from_e_nu(1.0, 0.499).unwrap().lambda;
        let l2 = lame_from_e_nu(1.0, 0.4999).unwrap().lambda;
        assert!(l2 > l1);
    }

    #[test]
    fn huge_lambda_stays_bounded() {
        let p = LameParams::new(1e12, 1.0).unwrap();
        let a = compliance_apply(&Matrix2::identity(), &p);
        assert!(a.iter().all(|v| v.is_finite()));
        // incompressible limit: the identity is annihilated
        assert!(a.abs().max() < 1e-11);
        let d = compliance_apply(&Matrix2::new(1.0, 0.0, 0.0, -1.0), &p);
        assert!((d - Matrix2::new(0.5, 0.0, 0.0, -0.5)).abs().max() < 1e-15);
    }

    proptest! {
        #[test]
        fn compliance_inverts_stiffness(
            a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64,
            lambda in 0.0..1e4f64, mu in 0.01..100.0f64,
        ) {
            let p = LameParams::new(lambda, mu).unwrap();
            let eps = Matrix2::new(a, b, b, c);
            let back = compliance_apply(&stiffness_apply(&eps, &p), &p);
            let scale = eps.abs().max().max(1.0);
            prop_assert!((back - eps).abs().max() <= 1e-12 * scale * (1.0 + lambda / mu));
        }

        #[test]
        fn compliance_splits_sym_and_skew(
            t in proptest::array::uniform4(-5.0..5.0f64),
            lambda in 0.0..100.0f64, mu in 0.1..10.0f64,
        ) {
            let p = LameParams::new(lambda, mu).unwrap();
            let tau = Matrix2::new(t[0], t[1], t[2], t[3]);
            let a = compliance_apply(&tau, &p);
            prop_assert!((sym(&a) - compliance_apply(&sym(&tau), &p)).abs().max() < 1e-12);
            prop_assert!((skew(&a) - skew(&tau)).abs().max() < 1e-12);
        }
    }
}
