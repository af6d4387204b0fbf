use super::{Method, ScoreVector};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::{leverage_scores, lewis_weights, norm2, Matrix};
use crate::Scalar;

/// Every row scores 1.
pub fn scores_uniform<T: Scalar>(ds: &LabeledDataset<T>) -> Result<ScoreVector<T>> {
    ScoreVector::new(vec![T::one(); ds.n()], Method::Uniform)
}

/// Rows `sign · y_i · x_i` with the intercept column removed.
fn signed_rows<T: Scalar>(ds: &LabeledDataset<T>, negate: bool) -> Matrix<T> {
    let x = ds.x_without_intercept();
    let signs: Vec<T> = ds
        .y()
        .iter()
        .map(|&y| {
            let s = if y > 0 { T::one() } else { -T::one() };
            if negate {
                -s
            } else {
                s
            }
        })
        .collect();
    x.scale_rows(&signs)
}

/// Root leverage scores `‖Q_i‖₂ + 1/n` of `Z_i = −y_i x_i`, optionally
/// rounded up to powers of two times the smallest score.
pub fn scores_leverage<T: Scalar>(ds: &LabeledDataset<T>, binning: bool) -> Result<ScoreVector<T>> {
    let z = signed_rows(ds, true);
    let inv_n = T::one() / T::of(ds.n() as f64);
    let mut s: Vec<T> = leverage_scores(&z)?.into_iter().map(|t| t.max(T::zero()).sqrt() + inv_n).collect();
    if binning {
        bin_powers_of_two(&mut s);
    }
    ScoreVector::new(s, Method::Leverage)
}

/// Rounds each value up to `min · 2^k` for the smallest integer `k`.
fn bin_powers_of_two<T: Scalar>(s: &mut [T]) {
    let min = s.iter().copied().fold(T::infinity(), T::min);
    let two = T::of(2.0);
    for v in s.iter_mut() {
        let k = (*v / min).log2().ceil().max(T::zero());
        *v = min * two.powf(k);
    }
}

/// Sensitivity bound for L2-regularized fits: with `k = 1/(2λ)`, rows sorted by
/// non-increasing norm get `(132 √k ‖x_(i)‖ + 2) / i` at 1-based position `i`.
/// Equal norms keep their original row order.
pub fn scores_monotonic<T: Scalar>(ds: &LabeledDataset<T>, lambda2: f64) -> Result<ScoreVector<T>> {
    if !(lambda2 > 0.0) || !lambda2.is_finite() {
        return Err(Error::Config(format!("monotonic scores need lambda2 > 0, got {lambda2}")));
    }
    let sqrt_k = T::of((1.0 / (2.0 * lambda2)).sqrt());
    let norms: Vec<T> = ds.x().rows().map(norm2).collect();
    let mut order: Vec<usize> = (0..ds.n()).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).expect("finite norms").then(a.cmp(&b)));
    let c = T::of(132.0);
    let two = T::of(2.0);
    let mut s = vec![T::zero(); ds.n()];
    for (pos, &row) in order.iter().enumerate() {
        s[row] = (c * sqrt_k * norms[row] + two) / T::of((pos + 1) as f64);
    }
    ScoreVector::new(s, Method::Monotonic)
}

/// ℓ1 Lewis weights of `Z_i = y_i x_i` (intercept removed) after `t` sweeps.
pub fn scores_lewis<T: Scalar>(ds: &LabeledDataset<T>, t: usize) -> Result<ScoreVector<T>> {
    let z = signed_rows(ds, false);
    ScoreVector::new(lewis_weights(&z, t)?, Method::Lewis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[[f64; 2]], y: Vec<i8>) -> LabeledDataset<f64> {
        LabeledDataset::new("t", Matrix::<f64>::from_f64_rows(rows).unwrap(), y, false).unwrap()
    }

    #[test]
    fn uniform_is_flat() {
        let d = ds(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], vec![1, -1, 1]);
        let s = scores_uniform(&d).unwrap();
        assert_eq!(s.values(), &[1.0; 3]);
        assert!(s.probabilities().iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn leverage_fixtures() {
        let d = ds(&[[1.0, 0.0], [0.0, 1.0]], vec![1, 1]);
        let s = scores_leverage(&d, false).unwrap();
        for v in s.values() {
            assert!((v - 1.5).abs() < 1e-12);
        }
        let d = ds(&[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![1, 1, 1]);
        let s = scores_leverage(&d, false).unwrap();
        let third = 1.0 / 3.0;
        let expected = [0.5f64.sqrt() + third, 0.5f64.sqrt() + third, 1.0 + third];
        for (v, e) in s.values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-9);
        }
        let flipped = ds(&[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![-1, 1, -1]);
        let sf = scores_leverage(&flipped, false).unwrap();
        for (a, b) in s.values().iter().zip(sf.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn leverage_ignores_intercept_column() {
        let base = ds(&[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![1, 1, 1]);
        let with = base.add_intercept().unwrap();
        let a = scores_leverage(&base, false).unwrap();
        let b = scores_leverage(&with, false).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn binning_rounds_up_to_powers_of_two() {
        let mut s = vec![1.0, 1.5, 2.0, 3.1, 8.0];
        bin_powers_of_two(&mut s);
        assert_eq!(s, vec![1.0, 2.0, 2.0, 4.0, 8.0]);
    }

    #[test]
    fn monotonic_examples() {
        // λ = 0.5 → k = 1; norms 2 and 1.
        let d = ds(&[[0.0, 1.0], [2.0, 0.0]], vec![1, -1]);
        let s = scores_monotonic(&d, 0.5).unwrap();
        assert_eq!(s.values(), &[67.0, 266.0]);

        let zero = ds(&[[0.0, 0.0]; 4], vec![1, 1, -1, -1]);
        let s = scores_monotonic(&zero, 0.5).unwrap();
        assert_eq!(s.values(), &[2.0, 1.0, 2.0 / 3.0, 0.5]);

        // λ / 100 → √k × 10 on the norm term only.
        let s_small = scores_monotonic(&d, 0.005).unwrap();
        assert!((s_small.values()[1] - (1320.0 * 2.0 + 2.0)).abs() < 1e-9);

        assert!(matches!(scores_monotonic(&d, 0.0), Err(Error::Config(_))));
    }

    #[test]
    fn monotonic_ties_decrease_with_position() {
        let d = ds(&[[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]], vec![1, 1, 1]);
        let s = scores_monotonic(&d, 0.1).unwrap();
        let v = s.values();
        assert!(v[0] > v[1] && v[1] > v[2]);
    }

    #[test]
    fn lewis_examples() {
        let d = ds(&[[1.0, 0.0], [0.0, 1.0]], vec![1, -1]);
        let s = scores_lewis(&d, 5).unwrap();
        assert!(s.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));

        let rows = [[1.0, 0.3], [0.2, -1.0], [2.0, 1.0], [-0.5, 0.5]];
        let a = scores_lewis(&ds(&rows, vec![1, 1, 1, 1]), 5).unwrap();
        let b = scores_lewis(&ds(&rows, vec![-1, 1, -1, 1]), 5).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
