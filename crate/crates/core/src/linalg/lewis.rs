use super::{dot, orthonormal_basis, Matrix};
use crate::error::{Error, Result};
use crate::Scalar;

const UNDERFLOW: f64 = 1e-300;

/// ℓ1 Lewis weights by the fixed-point iteration
/// `w_i ← sqrt(w_i · τ_i(W^{-1/2} Z))`, starting from `w = 1` and running
/// exactly `iterations` sweeps.
pub fn lewis_weights<T: Scalar>(z: &Matrix<T>, iterations: usize) -> Result<Vec<T>> {
    if iterations == 0 {
        return Err(Error::Config("Lewis iteration count must be at least 1".into()));
    }
    let mut w = vec![T::one(); z.nrows()];
    let mut rank = None;
    for _ in 0..iterations {
        let (next, r) = step(z, &w)?;
        match rank {
            None => rank = Some(r),
            Some(r0) if r < r0 => {
                return Err(Error::Rank(format!(
                    "reweighted matrix lost rank during Lewis iteration ({r} < {r0})"
                )))
            }
            _ => {}
        }
        w = next;
    }
    Ok(w)
}

/// One sweep of the Lewis fixed-point map; the residual
/// `max_i |w_i - lewis_step(z, w)_i|` measures distance from the fixed point.
pub fn lewis_step<T: Scalar>(z: &Matrix<T>, w: &[T]) -> Result<Vec<T>> {
    step(z, w).map(|(next, _)| next)
}

fn step<T: Scalar>(z: &Matrix<T>, w: &[T]) -> Result<(Vec<T>, usize)> {
    crate::error::check_len(z.nrows(), w.len())?;
    let inv_sqrt: Vec<T> = w.iter().map(|&wi| wi.sqrt().recip()).collect();
    let basis = orthonormal_basis(&z.scale_rows(&inv_sqrt))?;
    let floor = T::of(UNDERFLOW).max(T::min_positive_value());
    let mut next = Vec::with_capacity(w.len());
    for (i, (qi, &wi)) in basis.q.rows().zip(w).enumerate() {
        let v = (wi * dot(qi, qi)).sqrt();
        if !(v >= floor) {
            return Err(Error::Rank(format!("Lewis weight of row {i} underflowed")));
        }
        next.push(v);
    }
    Ok((next, basis.rank))
}
