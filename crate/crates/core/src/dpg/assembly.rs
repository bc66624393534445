use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DVector, Vector2};
use rayon::prelude::*;

use super::element::{condense, element_system, ReferenceTables};
use crate::error::{Error, Result};
use crate::fem::{DofRef, SpaceLayout};
use crate::material::Problem;
use crate::mesh::Mesh;

/// Condensed global system over the free trial dofs.
#[derive(Debug)]
pub struct GlobalSystem {
    pub matrix: SparseColMat<usize, f64>,
    pub rhs: DVector<f64>,
    pub layout: SpaceLayout,
    pub tables: ReferenceTables,
    /// Prescribed trace values, one per Dirichlet node.
    pub dirichlet_values: Vec<Vector2<f64>>,
}

impl GlobalSystem {
    pub fn ndof(&self) -> usize {
        self.layout.ndof()
    }

    pub fn nnz(&self) -> usize {
        self.matrix.compute_nnz()
    }
}

/// Local trial coefficients of element `t` from the global free vector.
pub fn local_coefficients(
    layout: &SpaceLayout,
    t: usize,
    x: &DVector<f64>,
    dirichlet_values: &[Vector2<f64>],
) -> DVector<f64> {
    DVector::from_iterator(
        layout.trial_local(),
        layout.element_dofs(t).iter().map(|d| match d.dof {
            DofRef::Free(g) => d.sign * x[g],
            DofRef::Fixed { node, component } => d.sign * dirichlet_values[node][component],
            DofRef::Zero => 0.0,
        }),
    )
}

struct Contribution {
    triplets: Vec<Triplet<usize, usize, f64>>,
    rhs: Vec<(usize, f64)>,
}

/// Builds and condenses every element system and scatters into the free
/// dofs; prescribed trace values are moved to the right-hand side.
pub fn assemble(mesh: &Mesh, layout: SpaceLayout, problem: &Problem) -> Result<GlobalSystem> {
    let tables = ReferenceTables::new(layout.k, layout.j);
    let dirichlet_values: Vec<Vector2<f64>> = layout
        .dirichlet_nodes
        .iter()
        .map(|x| problem.dirichlet_at(x))
        .collect();

    let parts: Vec<Contribution> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| -> Result<Contribution> {
            let es = element_system(mesh, t, &layout, &tables, problem);
            let c = condense(&es, t)?;
            let dofs = layout.element_dofs(t);
            let n = dofs.len();
            // lift of the prescribed values
            let mut lift = DVector::zeros(n);
            for (a, d) in dofs.iter().enumerate() {
                if let DofRef::Fixed { node, component } = d.dof {
                    lift[a] = d.sign * dirichlet_values[node][component];
                }
            }
            let local_rhs = &c.rhs - &c.matrix * lift;
            let mut triplets = Vec::with_capacity(n * n);
            let mut rhs = Vec::with_capacity(n);
            for (a, da) in dofs.iter().enumerate() {
                let DofRef::Free(ga) = da.dof else { continue };
                rhs.push((ga, da.sign * local_rhs[a]));
                for (b, db) in dofs.iter().enumerate() {
                    let DofRef::Free(gb) = db.dof else { continue };
                    triplets.push(Triplet::new(ga, gb, da.sign * db.sign * c.matrix[(a, b)]));
                }
            }
            Ok(Contribution { triplets, rhs })
        })
        .collect::<Result<_>>()?;

    let n = layout.ndof();
    let mut rhs = DVector::zeros(n);
    let total: usize = parts.iter().map(|p| p.triplets.len()).sum();
    let mut triplets = Vec::with_capacity(total);
    for p in parts {
        for (g, v) in p.rhs {
            rhs[g] += v;
        }
        triplets.extend(p.triplets);
    }
    let matrix = SparseColMat::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Factorization(format!("sparse assembly failed: {e:?}")))?;
    Ok(GlobalSystem {
        matrix,
        rhs,
        layout,
        tables,
        dirichlet_values,
    })
}
