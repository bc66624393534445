use rayon::prelude::*;

use super::assembly::{local_coefficients, GlobalSystem};
use super::element::{condense, element_system};
use super::solver::SolutionFields;
use crate::error::Result;
use crate::material::Problem;
use crate::mesh::Mesh;

/// Computes ε_h = G⁻¹(l − B x) on every element, the indicators
/// η_T = ‖ε_h‖_{V(T)} and η = (Σ η_T²)^{1/2}. Element systems are rebuilt
/// rather than kept from assembly.
pub fn residual_estimate(
    mesh: &Mesh,
    problem: &Problem,
    system: &GlobalSystem,
    mut fields: SolutionFields,
) -> Result<SolutionFields> {
    let layout = &system.layout;
    let per_element: Vec<_> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| -> Result<_> {
            let es = element_system(mesh, t, layout, &system.tables, problem);
            let c = condense(&es, t)?;
            let x = local_coefficients(layout, t, &fields.coefficients, &system.dirichlet_values);
            Ok(c.residual(&x))
        })
        .collect::<Result<_>>()?;
    let (residual, indicators): (Vec<_>, Vec<_>) = per_element.into_iter().unzip();
    fields.estimate = indicators.iter().map(|e| e * e).sum::<f64>().sqrt();
    fields.residual = residual;
    fields.indicators = indicators;
    Ok(fields)
}
