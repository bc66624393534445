use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("quadrature of degree {0} is not supported (max 20)")]
    UnsupportedQuadrature(usize),

    #[error("invalid material parameters: {0}")]
    Material(String),

    #[error("unknown problem `{0}` (expected smooth-square, locking-square or lshape)")]
    UnknownProblem(String),

    #[error("element {element}: Gram matrix is not positive definite")]
    GramNotSpd { element: usize },

    #[error("element {element}: postprocessing saddle system is singular")]
    SingularSaddle { element: usize },

    #[error("global system factorization failed: {0}")]
    Factorization(String),

    #[error("conjugate gradients did not converge: relative residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
