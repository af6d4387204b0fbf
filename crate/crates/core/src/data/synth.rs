use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::LabeledDataset;
use crate::error::{check_len, Error, Result};
use crate::glm::sigmoid;
use crate::linalg::{dot, Matrix};
use crate::Scalar;

/// Draws `x ~ N(0, I_d)` and `y = +1` with probability `σ(xᵀβ)`.
///
/// Each row consumes `d` normal draws followed by one uniform draw from a
/// ChaCha8 stream seeded with `seed`.
pub fn synthesize_logistic<T: Scalar>(n: usize, d: usize, beta_true: &[T], seed: u64) -> Result<LabeledDataset<T>> {
    if n == 0 || d == 0 {
        return Err(Error::Config(format!("synthetic data needs n, d >= 1 (got {n}, {d})")));
    }
    check_len(d, beta_true.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let start = data.len();
        for _ in 0..d {
            let v: f64 = rng.sample(StandardNormal);
            data.push(T::of(v));
        }
        let p = sigmoid(dot(&data[start..], beta_true));
        let u: f64 = rng.random();
        y.push(if T::of(u) < p { 1 } else { -1 });
    }
    LabeledDataset::new("synthetic", Matrix::from_vec(n, d, data)?, y, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_beta_is_balanced() {
        let n = 4000;
        let ds = synthesize_logistic::<f64>(n, 3, &[0.0; 3], 11).unwrap();
        let frac = ds.positive_fraction();
        assert!((frac - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt(), "{frac}");
    }

    #[test]
    fn deterministic_in_seed() {
        let a = synthesize_logistic::<f64>(50, 4, &[1.0, -1.0, 0.5, 0.0], 5).unwrap();
        let b = synthesize_logistic::<f64>(50, 4, &[1.0, -1.0, 0.5, 0.0], 5).unwrap();
        assert_eq!(a.x(), b.x());
        assert_eq!(a.y(), b.y());
        let c = synthesize_logistic::<f64>(50, 4, &[1.0, -1.0, 0.5, 0.0], 6).unwrap();
        assert_ne!(a.x(), c.x());
    }

    #[test]
    fn strong_signal_saturates() {
        let mut beta = vec![0.0; 4];
        beta[0] = 10.0;
        let ds = synthesize_logistic::<f64>(10_000, 4, &beta, 2).unwrap();
        let (mut hits, mut pos) = (0usize, 0usize);
        for (r, &y) in ds.x().rows().zip(ds.y()) {
            if r[0] > 1.0 {
                hits += 1;
                pos += usize::from(y == 1);
            }
        }
        assert!(hits > 1000);
        assert!(pos as f64 / hits as f64 > 0.99);
    }

    #[test]
    fn rejects_empty_shape() {
        assert!(synthesize_logistic::<f64>(0, 1, &[0.0], 0).is_err());
        assert!(synthesize_logistic::<f64>(3, 2, &[0.0], 0).is_err());
    }
}
