use super::{dot, norm2, Matrix};
use crate::error::{Error, Result};
use crate::Scalar;

/// Pivots of the triangular factor below `RANK_TOLERANCE` times the largest
/// pivot are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Orthonormal basis of the column space of a matrix.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis<T> {
    /// `n × rank` with orthonormal columns.
    pub q: Matrix<T>,
    pub rank: usize,
}

/// Householder QR with column pivoting, truncated at the numerical rank.
pub fn orthonormal_basis<T: Scalar>(z: &Matrix<T>) -> Result<OrthonormalBasis<T>> {
    let (n, d) = (z.nrows(), z.ncols());
    if d == 0 {
        return Err(Error::Shape("matrix has no columns".into()));
    }
    if n < d {
        return Err(Error::Shape(format!("need at least as many rows as columns, got {n}x{d}")));
    }
    if !z.is_finite() {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }

    let tol = T::of(RANK_TOLERANCE);
    let mut cols: Vec<Vec<T>> = (0..d).map(|j| z.column(j)).collect();
    let mut reflectors: Vec<(Vec<T>, T)> = Vec::with_capacity(d);
    let mut largest = T::zero();

    for k in 0..d {
        let mut pivot = k;
        let mut pivot_norm = norm2(&cols[k][k..]);
        for (j, col) in cols.iter().enumerate().skip(k + 1) {
            let nj = norm2(&col[k..]);
            if nj > pivot_norm {
                pivot = j;
                pivot_norm = nj;
            }
        }
        if k == 0 {
            if pivot_norm == T::zero() {
                return Err(Error::Rank("matrix is identically zero".into()));
            }
            largest = pivot_norm;
        }
        if pivot_norm <= tol * largest {
            break;
        }
        cols.swap(k, pivot);

        let x = &cols[k][k..];
        let alpha = if x[0] >= T::zero() { -pivot_norm } else { pivot_norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        let two = T::one() + T::one();
        for col in cols.iter_mut().skip(k + 1) {
            let tail = &mut col[k..];
            let s = two * dot(&v, tail) / vv;
            for (c, &vi) in tail.iter_mut().zip(&v) {
                *c -= s * vi;
            }
        }
        reflectors.push((v, vv));
    }

    let rank = reflectors.len();
    let mut q = Matrix::zeros(n, rank);
    let two = T::one() + T::one();
    let mut e = vec![T::zero(); n];
    for j in 0..rank {
        e.iter_mut().for_each(|v| *v = T::zero());
        e[j] = T::one();
        for (k, (v, vv)) in reflectors.iter().enumerate().rev() {
            let tail = &mut e[k..];
            let s = two * dot(v, tail) / *vv;
            for (c, &vi) in tail.iter_mut().zip(v) {
                *c -= s * vi;
            }
        }
        for (i, &val) in e.iter().enumerate() {
            q[(i, j)] = val;
        }
    }
    Ok(OrthonormalBasis { q, rank })
}

/// Statistical leverage scores: squared row norms of an orthonormal basis,
/// i.e. the diagonal of the hat matrix.
pub fn leverage_scores<T: Scalar>(z: &Matrix<T>) -> Result<Vec<T>> {
    let basis = orthonormal_basis(z)?;
    Ok(basis.q.rows().map(|r| dot(r, r)).collect())
}
