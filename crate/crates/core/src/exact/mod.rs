//! Exact scalars, polynomials and linear algebra over the Gaussian rationals.

pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod subspace;
pub mod vector;

pub use matrix::{LinearSolution, Matrix};
pub use poly::{Monomial, MultiPoly};
pub use scalar::{parse_rat, rat, rat_int, rat_to_f64, rat_to_string, Gauss, Rat, Scalar};
pub use subspace::Subspace;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("spectrum is not rational: {0}")]
    NonRationalSpectrum(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
}
