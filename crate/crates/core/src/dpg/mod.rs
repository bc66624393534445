//! Ultra-weak DPG discretisation: element matrices, static condensation of
//! the optimal test space, global assembly, linear solvers and the built-in
//! residual estimator.

mod assembly;
pub mod element;
mod estimator;
mod solver;

pub use assembly::{assemble, local_coefficients, GlobalSystem};
pub use element::{
    condense, element_b, element_gram, element_load, element_system, CondensedElement, ElementSystem,
    ReferenceTables,
};
pub use estimator::residual_estimate;
pub use solver::{solve, solve_linear, SolutionFields, SolverKind, SolverOptions};

use crate::error::Result;
use crate::fem::build_layout;
use crate::material::Problem;
use crate::mesh::Mesh;

/// Assembles, solves and evaluates the estimator on one mesh.
///
/// The discrete problem is posed with stresses in units of μ (so the
/// material has unit shear modulus); σ_h and the fluxes are returned in
/// physical units, while ε_h and η refer to the scaled problem.
pub fn solve_problem(
    mesh: &Mesh,
    problem: &Problem,
    k: usize,
    j: usize,
    options: &SolverOptions,
) -> Result<(GlobalSystem, SolutionFields)> {
    let mu = problem.lame.mu;
    let scaled = problem.scaled(mu)?;
    let layout = build_layout(mesh, k, j);
    let system = assemble(mesh, layout, &scaled)?;
    let fields = solve(&system, mesh, options)?;
    let mut fields = residual_estimate(mesh, &scaled, &system, fields)?;
    for c in fields.sigma.coeffs.iter_mut() {
        *c *= mu;
    }
    fields.flux.iter_mut().for_each(|v| *v *= mu);
    Ok((system, fields))
}
