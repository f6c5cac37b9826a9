//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors produced by tensor algebra, plan selection and the integrators.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix or tensor dimension did not match along the given axis.
    #[error("dimension mismatch on axis {axis}: expected {expected}, found {found}")]
    DimensionMismatch {
        axis: usize,
        expected: usize,
        found: usize,
    },

    /// A vector length did not match the product of the tensor dimensions.
    #[error("data length {found} does not match tensor size {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Newton iteration for quadrature nodes failed to converge.
    #[error("Newton iteration for node {node} of the {q}-point rule did not converge")]
    NewtonNoConvergence { q: usize, node: usize },

    /// Kernel evaluation requested too close to the integration interval.
    #[error("kernel argument {z} is within {dist:.3e} of [0,1]; minimum distance is 1e-8")]
    KernelNearInterval { z: num_complex::Complex64, dist: f64 },

    /// The (s, q) search ran out of scalings without satisfying the bound.
    #[error("plan search exhausted at s = {s_max}: {binding}")]
    PlanSearchExhausted { s_max: usize, binding: String },

    /// Reference computations are capped to small assembled operators.
    #[error("oracle size {size} exceeds the desk-scale cap {cap}")]
    OracleSizeCap { size: usize, cap: usize },

    #[error("grid of {n} points is too small for a stencil of width {width}")]
    GridTooSmall { n: usize, width: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
