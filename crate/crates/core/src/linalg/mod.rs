//! Dense linear algebra used by the score functions and the solver.

mod cholesky;
mod lewis;
mod matrix;
mod qr;

pub use cholesky::Cholesky;
pub use lewis::{lewis_step, lewis_weights};
pub use matrix::Matrix;
pub use qr::{leverage_scores, orthonormal_basis, OrthonormalBasis, RANK_TOLERANCE};

use crate::Scalar;

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub(crate) fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
