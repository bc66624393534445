//! Dörfler marking and the adaptive solve-estimate-mark-refine loop.

use crate::dpg::{solve_problem, SolverOptions};
use crate::error::{Error, Result};
use crate::material::Problem;
use crate::mesh::Mesh;
use crate::postprocess::postprocess;
use crate::study::l2_field_error;

/// Smallest set M with Σ_{T∈M} η_T² ≥ θ Σ_T η_T², chosen greedily by
/// decreasing indicator (ties broken by lower id). Returned sorted by id.
pub fn doerfler_mark(eta: &[f64], theta: f64) -> Result<Vec<usize>> {
    if eta.is_empty() {
        return Err(Error::InvalidArgument("empty indicator list".into()));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta must lie in (0, 1], got {theta}")));
    }
    let mut order: Vec<usize> = (0..eta.len()).collect();
    order.sort_by(|&a, &b| eta[b].total_cmp(&eta[a]).then(a.cmp(&b)));
    // same summation order for the total and the prefix sums
    let total: f64 = order.iter().map(|&i| eta[i] * eta[i]).sum();
    if total == 0.0 {
        return Ok(Vec::new());
    }
    let target = theta * total;
    let mut acc = 0.0;
    let mut marked = Vec::new();
    for &i in &order {
        acc += eta[i] * eta[i];
        marked.push(i);
        if acc >= target {
            break;
        }
    }
    marked.sort_unstable();
    Ok(marked)
}

#[derive(Debug, Clone)]
pub struct AfemStep {
    pub step: usize,
    pub ndof: usize,
    pub num_elements: usize,
    pub h_max: f64,
    pub eta: f64,
    pub indicators: Vec<f64>,
    pub marked: usize,
    pub err_u: Option<f64>,
    pub err_post: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct AfemRun {
    pub steps: Vec<AfemStep>,
    /// Mesh of the last solve.
    pub mesh: Mesh,
}

pub fn afem_loop(
    problem: &Problem,
    k: usize,
    j: usize,
    theta: f64,
    steps: usize,
    with_post: bool,
    options: &SolverOptions,
) -> Result<AfemRun> {
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is required".into()));
    }
    let mut mesh = problem.initial_mesh();
    let mut records = Vec::with_capacity(steps);
    for step in 0..steps {
        let (system, fields) = solve_problem(&mesh, problem, k, j, options)?;
        let (mut err_u, mut err_post) = (None, None);
        if let Some(exact) = &problem.exact_u {
            err_u = Some(l2_field_error(&mesh, &fields.u, exact.as_ref()));
            if with_post {
                let post = postprocess(&mesh, &fields.sigma, &fields.u, k, &problem.lame)?;
                err_post = Some(l2_field_error(&mesh, &post, exact.as_ref()));
            }
        }
        let last = step + 1 == steps;
        let marked = if last { Vec::new() } else { doerfler_mark(&fields.indicators, theta)? };
        records.push(AfemStep {
            step,
            ndof: system.ndof(),
            num_elements: mesh.num_triangles(),
            h_max: mesh.h_max(),
            eta: fields.estimate,
            indicators: fields.indicators,
            marked: marked.len(),
            err_u,
            err_post,
        });
        if !last {
            if marked.is_empty() {
                break;
            }
            mesh = mesh.bisect(&marked)?;
        }
    }
    Ok(AfemRun { steps: records, mesh })
}
