//! Actions of matrix phi-functions of Kronecker sums.
//!
//! The large operator `K = A_d (+) ... (+) A_1` is never assembled; its
//! phi-function actions are evaluated through Gauss-Lobatto-Legendre
//! quadrature of the integral representation, a modified scaling-and-squaring
//! lift, and mu-mode Tucker operators built from exponentials of the small
//! factor matrices. Exponential Runge-Kutta integrators of stiff orders one
//! to four sit on top, together with the finite-difference benchmark problems
//! that exercise them.

pub mod dense;
pub mod error;
pub mod expint;
pub mod oracle;
pub mod phi;
pub mod problems;
pub mod quad;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use tensor::{DenseMatrix, Tensor};
