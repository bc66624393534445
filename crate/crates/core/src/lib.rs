//! Ultra-weak discontinuous Petrov-Galerkin discretisation of two-dimensional
//! linear elasticity.
//!
//! The solver works with the first-order stress/displacement system, broken
//! test spaces and skeleton traces. On top of the discrete solution it offers
//! a residual error estimator, an element-local rigid-body-constrained
//! postprocessing of the displacement, Dörfler-marked adaptive refinement and
//! a set of convergence studies that emit CSV tables.
//!
//! Modules, bottom-up:
//! - [`mesh`]: triangulations, red refinement and newest-vertex bisection.
//! - [`fem`]: quadrature, orthonormal modal bases, degree-of-freedom layout
//!   and elementwise L² projections.
//! - [`material`]: compliance/stiffness tensors and the benchmark problems.
//! - [`dpg`]: element matrices, condensation, assembly, solve and estimator.
//! - [`postprocess`]: rigid-body projection and the local Neumann
//!   reconstruction of a higher-degree displacement.
//! - [`adaptivity`]: Dörfler marking and the adaptive loop.
//! - [`study`]: convergence/locking/L-shape runners, EOC and CSV output.

pub mod adaptivity;
pub mod dpg;
pub mod error;
pub mod fem;
pub mod material;
pub mod mesh;
pub mod postprocess;
pub mod study;

pub use error::{Error, Result};
