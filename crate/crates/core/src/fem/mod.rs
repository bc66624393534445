//! Finite element infrastructure: quadrature, bases, element geometry,
//! degree-of-freedom layout and L² projections.

pub mod basis;
pub mod layout;
pub mod projection;
pub mod quadrature;

use nalgebra::{Matrix2, Vector2};

use crate::mesh::{Mesh, Point2};

pub use basis::{dim_p, ScalarBasis};
pub use layout::{build_layout, DofRef, LocalDof, SpaceLayout};
pub use projection::{l2_project, l2_project_vector, PiecewisePolynomial};
pub use quadrature::{quad_rule, QuadratureRule};

/// Affine map from the reference triangle onto a mesh element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub origin: Point2,
    pub jacobian: Matrix2<f64>,
    pub inverse: Matrix2<f64>,
    pub det: f64,
}

impl ElementGeometry {
    pub fn new(mesh: &Mesh, t: usize) -> Self {
        let [a, b, c] = mesh.corners(t);
        let jacobian = Matrix2::from_columns(&[b - a, c - a]);
        let det = jacobian.determinant();
        let inverse = jacobian.try_inverse().expect("non-degenerate element");
        ElementGeometry {
            origin: a,
            jacobian,
            inverse,
            det,
        }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }

    pub fn to_physical(&self, p: [f64; 2]) -> Point2 {
        self.origin + self.jacobian * Vector2::new(p[0], p[1])
    }

    pub fn to_reference(&self, x: &Point2) -> [f64; 2] {
        let r = self.inverse * (x - self.origin);
        [r.x, r.y]
    }

    /// Scale turning reference-orthonormal functions into L²(T)-orthonormal ones.
    pub fn basis_scale(&self) -> f64 {
        1.0 / self.det.sqrt()
    }

    /// Physical gradient from a reference gradient (before basis scaling).
    pub fn push_gradient(&self, g: [f64; 2]) -> Vector2<f64> {
        self.inverse.transpose() * Vector2::new(g[0], g[1])
    }
}
