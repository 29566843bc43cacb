//! Operator classes, closed-form powers and the two sides of a covariance relation.

pub mod affine;
pub mod kernel;
pub mod operator;
pub mod polynomial;
pub mod relation;

pub use affine::{AffineMap, MAP_EPS};
pub use kernel::{compare_kernel_sums, Kernel, KernelComparison, KernelSum};
pub use operator::OperatorSpec;
pub use polynomial::{Polynomial, CANCEL_EPS};
pub use relation::{relation_sides, Factor, OperatorExpr, RelationForm, Term};

/// m-fold self-composition of an affine map.
pub fn iterate(map: &AffineMap, m: u32) -> AffineMap {
    map.iterate(m)
}
