//! Scalar backends, dense matrices, exact linear solving, the Neumann-series
//! finiteness certificate and floating-point spectral radius estimation.

mod linalg;
mod matrix;
mod scalar;
mod spectral;

pub use linalg::{determinant, has_finite_mass, inverse, neumann_inverse, solve_linear};
pub use matrix::{dot, Matrix, Vector};
pub use scalar::{
    format_rational, format_scalar, parse_rational, rational_approximation, Backend, Rational, Scalar,
    FLOAT_TOLERANCE,
};
pub(crate) use spectral::irreducible_blocks;
pub use spectral::{spectral_radius, DEFAULT_TOLERANCE, MAX_ITERATIONS};

