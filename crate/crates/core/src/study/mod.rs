//! Convergence, locking and L-shape studies, EOC computation and CSV output.

mod csv;

pub use csv::{format_float, write_csv, write_locking_csv, CSV_HEADER};

use nalgebra::Vector2;

use crate::adaptivity::afem_loop;
use crate::dpg::{solve_problem, SolverOptions};
use crate::error::{Error, Result};
use crate::fem::{l2_project_vector, PiecewisePolynomial};
use crate::material::{problem_locking_square, Problem};
use crate::mesh::{Mesh, Point2};
use crate::postprocess::postprocess;

/// One row of a study table; missing quantities are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    pub level: usize,
    pub ndof: usize,
    pub hmax: f64,
    pub err_u: f64,
    pub err_u_aug: f64,
    pub err_post: f64,
    pub err_proj: f64,
    pub err_gap: f64,
    pub eta: f64,
    pub eoc_u: f64,
    pub eoc_aug: f64,
    pub eoc_post: f64,
    pub eoc_gap: f64,
}

impl StudyRecord {
    fn new(level: usize, ndof: usize, hmax: f64) -> Self {
        StudyRecord {
            level,
            ndof,
            hmax,
            err_u: f64::NAN,
            err_u_aug: f64::NAN,
            err_post: f64::NAN,
            err_proj: f64::NAN,
            err_gap: f64::NAN,
            eta: f64::NAN,
            eoc_u: f64::NAN,
            eoc_aug: f64::NAN,
            eoc_post: f64::NAN,
            eoc_gap: f64::NAN,
        }
    }
}

/// log(e_prev / e_cur) / log(h_prev / h_cur); NaN for nonpositive input.
pub fn eoc(e_prev: f64, e_cur: f64, h_prev: f64, h_cur: f64) -> f64 {
    if !(e_prev > 0.0 && e_cur > 0.0 && h_prev > 0.0 && h_cur > 0.0) || h_prev == h_cur {
        return f64::NAN;
    }
    (e_prev / e_cur).ln() / (h_prev / h_cur).ln()
}

/// Rate with respect to the number of unknowns, h ~ ndof^{-1/2}.
pub fn eoc_ndof(e_prev: f64, e_cur: f64, n_prev: usize, n_cur: usize) -> f64 {
    if !(e_prev > 0.0 && e_cur > 0.0) || n_prev == n_cur || n_prev == 0 || n_cur == 0 {
        return f64::NAN;
    }
    -2.0 * (e_cur / e_prev).ln() / (n_cur as f64 / n_prev as f64).ln()
}

/// ‖u − u_h‖_{L²(Ω)} with the load-accuracy quadrature.
pub fn l2_field_error(
    mesh: &Mesh,
    field: &PiecewisePolynomial,
    exact: impl Fn(&Point2) -> Vector2<f64> + Sync,
) -> f64 {
    let degree = 2 * (field.degree + 1) + 6;
    field.l2_distance(mesh, degree, |x| {
        let v = exact(x);
        [v.x, v.y]
    })
}

fn fill_eocs(records: &mut [StudyRecord]) {
    for i in 1..records.len() {
        let (a, b) = (records[i - 1].clone(), &mut records[i]);
        b.eoc_u = eoc(a.err_u, b.err_u, a.hmax, b.hmax);
        b.eoc_aug = eoc(a.err_u_aug, b.err_u_aug, a.hmax, b.hmax);
        b.eoc_post = eoc(a.err_post, b.err_post, a.hmax, b.hmax);
        b.eoc_gap = eoc(a.err_gap, b.err_gap, a.hmax, b.hmax);
    }
}

/// Uniform refinement study starting from the problem's initial mesh.
pub fn run_convergence(
    problem: &Problem,
    k: usize,
    j: usize,
    levels: usize,
    with_post: bool,
    options: &SolverOptions,
) -> Result<Vec<StudyRecord>> {
    let exact = problem
        .exact_u
        .clone()
        .ok_or_else(|| Error::InvalidArgument(format!("problem {} has no exact solution", problem.name)))?;
    let mut mesh = problem.initial_mesh();
    let mut records = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            mesh = mesh.uniform_refine();
        }
        let (system, fields) = solve_problem(&mesh, problem, k, j, options)?;
        let mut r = StudyRecord::new(level, system.ndof(), mesh.h_max());
        r.eta = fields.estimate;
        r.err_u = l2_field_error(&mesh, &fields.u, exact.as_ref());
        if j == 1 {
            r.err_u_aug = r.err_u;
        }
        let proj = l2_project_vector(exact.as_ref(), k + j, &mesh);
        r.err_proj = l2_field_error(&mesh, &proj, exact.as_ref());
        r.err_gap = fields.u.l2_distance_to(&proj);
        if with_post {
            let post = postprocess(&mesh, &fields.sigma, &fields.u, k, &problem.lame)?;
            r.err_post = l2_field_error(&mesh, &post, exact.as_ref());
        }
        records.push(r);
    }
    fill_eocs(&mut records);
    Ok(records)
}

/// Convergence study on the locking problem for each Poisson ratio.
pub fn run_locking(
    nus: &[f64],
    e: f64,
    k: usize,
    j: usize,
    levels: usize,
    with_post: bool,
    options: &SolverOptions,
) -> Result<Vec<(f64, Vec<StudyRecord>)>> {
    nus.iter()
        .map(|&nu| {
            let problem = problem_locking_square(e, nu)?;
            Ok((nu, run_convergence(&problem, k, j, levels, with_post, options)?))
        })
        .collect()
}

/// Per level, max over ν of err_u divided by min over ν.
pub fn locking_ratios(runs: &[(f64, Vec<StudyRecord>)]) -> Vec<f64> {
    let levels = runs.iter().map(|(_, r)| r.len()).min().unwrap_or(0);
    (0..levels)
        .map(|l| {
            let errs = runs.iter().map(|(_, r)| r[l].err_u);
            let max = errs.clone().fold(f64::NEG_INFINITY, f64::max);
            let min = errs.fold(f64::INFINITY, f64::min);
            max / min
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinementMode {
    Uniform,
    Adaptive,
}

#[derive(Debug, Clone)]
pub struct LshapeStudy {
    pub records: Vec<StudyRecord>,
    /// Least-squares slope of log η against log ndof over the last three steps.
    pub slope: f64,
    pub mesh: Mesh,
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn tail_slope(records: &[StudyRecord]) -> f64 {
    let tail = &records[records.len().saturating_sub(3)..];
    if tail.len() < 2 {
        return f64::NAN;
    }
    let x: Vec<f64> = tail.iter().map(|r| r.ndof as f64).collect();
    let y: Vec<f64> = tail.iter().map(|r| r.eta).collect();
    loglog_slope(&x, &y)
}

/// η-vs-ndof study on the L-shape with uniform or adaptive refinement.
pub fn run_lshape(
    problem: &Problem,
    mode: RefinementMode,
    theta: f64,
    steps: usize,
    k: usize,
    j: usize,
    with_post: bool,
    options: &SolverOptions,
) -> Result<LshapeStudy> {
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is required".into()));
    }
    let mut records = Vec::with_capacity(steps);
    let mesh = match mode {
        RefinementMode::Uniform => {
            let mut mesh = problem.initial_mesh();
            for level in 0..steps {
                if level > 0 {
                    mesh = mesh.uniform_refine();
                }
                let (system, fields) = solve_problem(&mesh, problem, k, j, options)?;
                if with_post {
                    postprocess(&mesh, &fields.sigma, &fields.u, k, &problem.lame)?;
                }
                let mut r = StudyRecord::new(level, system.ndof(), mesh.h_max());
                r.eta = fields.estimate;
                records.push(r);
            }
            mesh
        }
        RefinementMode::Adaptive => {
            let run = afem_loop(problem, k, j, theta, steps, with_post, options)?;
            for s in &run.steps {
                let mut r = StudyRecord::new(s.step, s.ndof, s.h_max);
                r.eta = s.eta;
                r.err_u = s.err_u.unwrap_or(f64::NAN);
                r.err_post = s.err_post.unwrap_or(f64::NAN);
                records.push(r);
            }
            run.mesh
        }
    };
    // no exact solution: rates of η against ndof
    for i in 1..records.len() {
        let (a, b) = (records[i - 1].clone(), &mut records[i]);
        b.eoc_u = eoc_ndof(a.err_u, b.err_u, a.ndof, b.ndof);
        b.eoc_post = eoc_ndof(a.err_post, b.err_post, a.ndof, b.ndof);
    }
    let slope = tail_slope(&records);
    Ok(LshapeStudy { records, slope, mesh })
}

/// Smallest element diameter within `radius` of `center` and elsewhere.
pub fn refinement_concentration(mesh: &Mesh, center: &Point2, radius: f64) -> (f64, f64) {
    let mut near = f64::INFINITY;
    let mut far = f64::INFINITY;
    for t in 0..mesh.num_triangles() {
        let d = mesh.diameter(t);
        let dist = mesh
            .corners(t)
            .iter()
            .map(|p| (p - center).norm())
            .fold(f64::INFINITY, f64::min);
        if dist <= radius {
            near = near.min(d);
        } else {
            far = far.min(d);
        }
    }
    (near, far)
}
