//! Complex linear algebra and Wirtinger finite differences.

mod eigen;
mod hermitian;
mod vector;
mod wirtinger;

pub use eigen::{hermitian_eigenvalues, hermitian_min_eigen};
pub use hermitian::{hermitian_inverse_det, Definiteness, HermitianMatrix, SINGULAR_DET};
pub use vector::{ComplexVector, Point};
pub use wirtinger::{
    combine, first_step, mixed_wirtinger, mixed_wirtinger_with_step, outer_step, wirtinger_derivative,
    wirtinger_derivative_with_step, ScalarField, Wirtinger, FIRST_STEP, OUTER_STEP,
};
