use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};

use super::{lame_from_e_nu, stiffness_apply, LameParams};
use crate::error::{Error, Result};
use crate::mesh::{l_shape_mesh, unit_square_mesh, Mesh, Point2};

pub type VectorField = Arc<dyn Fn(&Point2) -> Vector2<f64> + Send + Sync>;
pub type MatrixField = Arc<dyn Fn(&Point2) -> Matrix2<f64> + Send + Sync>;
type MeshFactory = Arc<dyn Fn() -> Mesh + Send + Sync>;

/// A boundary value problem: material, body force, optional exact solution
/// and the initial mesh (which carries the Dirichlet/Neumann split).
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub lame: LameParams,
    pub body_force: VectorField,
    pub exact_u: Option<VectorField>,
    pub exact_sigma: Option<MatrixField>,
    /// Displacement prescribed on Γ_D; `None` means homogeneous.
    pub dirichlet_data: Option<VectorField>,
    mesh: MeshFactory,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("lame", &self.lame)
            .field("has_exact", &self.exact_u.is_some())
            .finish()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        lame: LameParams,
        body_force: VectorField,
        mesh: impl Fn() -> Mesh + Send + Sync + 'static,
    ) -> Self {
        Problem {
            name: name.into(),
            lame,
            body_force,
            exact_u: None,
            exact_sigma: None,
            dirichlet_data: None,
            mesh: Arc::new(mesh),
        }
    }

    pub fn with_exact(mut self, u: VectorField, sigma: MatrixField) -> Self {
        self.exact_u = Some(u);
        self.exact_sigma = Some(sigma);
        self
    }

    pub fn with_dirichlet_data(mut self, g: VectorField) -> Self {
        self.dirichlet_data = Some(g);
        self
    }

    pub fn initial_mesh(&self) -> Mesh {
        (self.mesh)()
    }

    pub fn has_exact_solution(&self) -> bool {
        self.exact_u.is_some()
    }

    /// Same problem with stresses measured in units of `scale`: λ and μ and
    /// the body force are divided by `scale`, displacements are unchanged.
    pub fn scaled(&self, scale: f64) -> Result<Problem> {
        let lame = LameParams::new(self.lame.lambda / scale, self.lame.mu / scale)?;
        let f = self.body_force.clone();
        let mut out = self.clone();
        out.lame = lame;
        out.body_force = Arc::new(move |x: &Point2| f(x) / scale);
        if let Some(s) = self.exact_sigma.clone() {
            out.exact_sigma = Some(Arc::new(move |x: &Point2| s(x) / scale));
        }
        Ok(out)
    }

    pub fn body_force_at(&self, x: &Point2) -> Vector2<f64> {
        (self.body_force)(x)
    }

    pub fn dirichlet_at(&self, x: &Point2) -> Vector2<f64> {
        self.dirichlet_data
            .as_ref()
            .map_or_else(Vector2::zeros, |g| g(x))
    }
}

/// Registry lookup: `smooth-square` (λ = μ = 1), `locking-square`
/// (E = 10⁵, ν = 0.3) and `lshape` (E = 1, ν = 0.4).
pub fn problem_by_name(name: &str) -> Result<Problem> {
    match name {
        "smooth-square" => Ok(problem_smooth_square(LameParams::new(1.0, 1.0)?)),
        "locking-square" => problem_locking_square(1e5, 0.3),
        "lshape" => problem_lshape(1.0, 0.4),
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

/// u = (sin πx sin πy)(1, 1) on (0,1)², clamped everywhere.
pub fn problem_smooth_square(p: LameParams) -> Problem {
    let u: VectorField = Arc::new(|x: &Point2| {
        let s = (PI * x.x).sin() * (PI * x.y).sin();
        Vector2::new(s, s)
    });
    let sigma: MatrixField = Arc::new(move |x: &Point2| {
        let sx = PI * (PI * x.x).cos() * (PI * x.y).sin();
        let sy = PI * (PI * x.x).sin() * (PI * x.y).cos();
        // ∇u has rows (sx, sy) for both components
        let grad = Matrix2::new(sx, sy, sx, sy);
        stiffness_apply(&grad, &p)
    });
    let f: VectorField = Arc::new(move |x: &Point2| {
        let s = (PI * x.x).sin() * (PI * x.y).sin();
        let c = PI * PI * (PI * x.x).cos() * (PI * x.y).cos();
        let v = (3.0 * p.mu + p.lambda) * PI * PI * s - (p.lambda + p.mu) * c;
        Vector2::new(v, v)
    });
    Problem::new("smooth-square", p, f, || unit_square_mesh(2)).with_exact(u, sigma)
}

/// Divergence-free displacement on (0,1)², clamped everywhere; the data
/// depends on μ only.
pub fn problem_locking_square(e: f64, nu: f64) -> Result<Problem> {
    let p = lame_from_e_nu(e, nu)?;
    let mu = p.mu;
    let u: VectorField = Arc::new(|x: &Point2| {
        let (sx, cx) = (PI * x.x).sin_cos();
        let (sy, cy) = (PI * x.y).sin_cos();
        Vector2::new(PI * cy * sx * sx * sy, -PI * cx * sx * sy * sy)
    });
    let sigma: MatrixField = Arc::new(move |x: &Point2| {
        let (sx, cx) = (PI * x.x).sin_cos();
        let (sy, cy) = (PI * x.y).sin_cos();
        let pi2 = PI * PI;
        let grad = Matrix2::new(
            2.0 * pi2 * sx * cx * sy * cy,
            pi2 * sx * sx * (2.0 * PI * x.y).cos(),
            -pi2 * (2.0 * PI * x.x).cos() * sy * sy,
            -2.0 * pi2 * sx * cx * sy * cy,
        );
        stiffness_apply(&grad, &p)
    });
    let f: VectorField = Arc::new(move |x: &Point2| {
        let (sx, cx) = (PI * x.x).sin_cos();
        let (sy, cy) = (PI * x.y).sin_cos();
        let a = 2.0 * PI.powi(3) * mu;
        Vector2::new(
            -a * (2.0 * (2.0 * PI * x.x).cos() - 1.0) * sy * cy,
            -a * (1.0 - 2.0 * (2.0 * PI * x.y).cos()) * sx * cx,
        )
    });
    Ok(Problem::new("locking-square", p, f, || unit_square_mesh(2)).with_exact(u, sigma))
}

/// L-shaped domain (−1,1)² \ [0,1]×[−1,0], clamped everywhere, with a
/// piecewise constant horizontal load near the re-entrant corner. The
/// initial mesh is the three-square mesh refined once (24 triangles).
pub fn problem_lshape(e: f64, nu: f64) -> Result<Problem> {
    let p = lame_from_e_nu(e, nu)?;
    let f: VectorField = Arc::new(|x: &Point2| {
        if x.x * x.y >= 0.0 && x.x.abs().max(x.y.abs()) <= 0.5 {
            Vector2::new(1.0, 0.0)
        } else {
            Vector2::zeros()
        }
    });
    Ok(Problem::new("lshape", p, f, || l_shape_mesh().uniform_refine()))
}
