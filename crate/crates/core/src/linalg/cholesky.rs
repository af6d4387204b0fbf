use super::Matrix;
use crate::Scalar;

/// Cholesky factor `A = L Lᵀ` of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Returns `None` when a pivot is not strictly positive.
    pub fn factor(a: &Matrix<T>) -> Option<Self> {
        let n = a.nrows();
        debug_assert_eq!(n, a.ncols());
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut diag = a[(j, j)];
            for k in 0..j {
                diag -= l[(j, k)] * l[(j, k)];
            }
            if !(diag > T::zero()) {
                return None;
            }
            let ljj = diag.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Some(Self { l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.nrows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    /// Cheap condition-number estimate `(max_i L_ii / min_i L_ii)²`.
    ///
    /// This is a lower bound on the 2-norm condition number of `A`.
    pub fn condition_estimate(&self) -> T {
        let n = self.l.nrows();
        let (lo, hi) = (0..n).map(|i| self.l[(i, i)]).fold((T::infinity(), T::zero()), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        let r = hi / lo;
        r * r
    }
}
