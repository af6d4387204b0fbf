use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Method, ScoreVector};
use crate::data::LabeledDataset;
use crate::error::{check_len, Error, Result};
use crate::glm::{fit_weighted, predict_proba, FitConfig, FitResult};
use crate::linalg::{norm2, Cholesky, Matrix};
use crate::Scalar;

/// Condition estimate above which the information matrix counts as singular.
pub const MAX_INFORMATION_CONDITION: f64 = 1e12;

const PILOT_ATTEMPTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OsmacVariant {
    /// Residual times row norm.
    Vc,
    /// Residual times the norm of `M_X⁻¹ x_i`.
    Mse,
}

/// Per-row weights `n / (2 n_c)` giving each class a total weight of `n / 2`.
pub fn balanced_class_weights<T: Scalar>(y: &[i8]) -> Result<Vec<T>> {
    let n = y.len();
    let pos = y.iter().filter(|&&v| v > 0).count();
    let neg = n - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateLabels(format!("{pos} positive and {neg} negative labels")));
    }
    let half = T::of(n as f64 / 2.0);
    let wp = half / T::of(pos as f64);
    let wn = half / T::of(neg as f64);
    Ok(y.iter().map(|&v| if v > 0 { wp } else { wn }).collect())
}

/// Class-balanced weighted fit on `m_pilot` rows drawn uniformly without
/// replacement. Draws showing a single class are redrawn, up to ten attempts.
pub fn pilot_estimate<T: Scalar>(
    ds: &LabeledDataset<T>,
    m_pilot: usize,
    seed: u64,
    fit: &FitConfig,
) -> Result<FitResult<T>> {
    if m_pilot < 2 {
        return Err(Error::Config(format!("pilot needs at least 2 rows, got {m_pilot}")));
    }
    let size = m_pilot.min(ds.n());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..PILOT_ATTEMPTS {
        let mut rows = rand::seq::index::sample(&mut rng, ds.n(), size).into_vec();
        rows.sort_unstable();
        let pilot = ds.select_rows(&rows);
        match balanced_class_weights::<T>(pilot.y()) {
            Ok(w) => return fit_weighted(&pilot, &w, fit),
            Err(Error::DegenerateLabels(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegeneratePilot {
        attempts: PILOT_ATTEMPTS,
    })
}

/// Residual-based scores from a pilot coefficient vector, with labels mapped to {0, 1}.
pub fn scores_osmac<T: Scalar>(
    ds: &LabeledDataset<T>,
    pilot_beta: &[T],
    variant: OsmacVariant,
) -> Result<ScoreVector<T>> {
    check_len(ds.d(), pilot_beta.len())?;
    let x = ds.x();
    let p = predict_proba(pilot_beta, x)?;
    let half = T::of(0.5);
    let residual: Vec<T> = ds
        .y()
        .iter()
        .zip(&p)
        .map(|(&y, &pi)| ((T::of(y as f64) + T::one()) * half - pi).abs())
        .collect();
    let (scores, method) = match variant {
        OsmacVariant::Vc => (
            residual.iter().zip(x.rows()).map(|(&r, row)| r * norm2(row)).collect(),
            Method::OsmacVc,
        ),
        OsmacVariant::Mse => {
            let chol = information_factor(x, &p)?;
            let s = residual
                .iter()
                .zip(x.rows())
                .map(|(&r, row)| r * norm2(&chol.solve(row)))
                .collect();
            (s, Method::OsmacMse)
        }
    };
    ScoreVector::new(scores, method)
}

/// Cholesky factor of `M_X = (1/n) Σ p_i (1 − p_i) x_i x_iᵀ`.
fn information_factor<T: Scalar>(x: &Matrix<T>, p: &[T]) -> Result<Cholesky<T>> {
    let d = x.ncols();
    let mut m = Matrix::<T>::zeros(d, d);
    let inv_n = T::one() / T::of(x.nrows() as f64);
    for (row, &pi) in x.rows().zip(p) {
        let c = pi * (T::one() - pi) * inv_n;
        for a in 0..d {
            let ca = c * row[a];
            for b in 0..=a {
                m[(a, b)] += ca * row[b];
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            m[(b, a)] = m[(a, b)];
        }
    }
    match Cholesky::factor(&m) {
        None => Err(Error::SingularInformation { condition: f64::INFINITY }),
        Some(chol) => {
            let condition = chol.condition_estimate().as_f64();
            if condition.is_finite() && condition <= MAX_INFORMATION_CONDITION {
                Ok(chol)
            } else {
                Err(Error::SingularInformation { condition })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]], y: Vec<i8>) -> LabeledDataset<f64> {
        LabeledDataset::new("o", Matrix::<f64>::from_f64_rows(rows).unwrap(), y, false).unwrap()
    }

    #[test]
    fn class_weights() {
        let w: Vec<f64> = balanced_class_weights(&[1, 1, 1, -1]).unwrap();
        let third = 2.0 / 3.0;
        assert_eq!(w, vec![third, third, third, 2.0]);
        let w: Vec<f64> = balanced_class_weights(&[1, -1, -1, 1]).unwrap();
        assert_eq!(w, vec![1.0; 4]);
        assert!(balanced_class_weights::<f64>(&[1, 1]).is_err());
    }

    #[test]
    fn zero_pilot_examples() {
        let d = ds(&[&[3.0, 4.0], &[1.0, 0.0], &[0.0, 0.0]], vec![1, -1, 1]);
        let s = scores_osmac(&d, &[0.0, 0.0], OsmacVariant::Vc).unwrap();
        assert_eq!(&s.values()[..2], &[2.5, 0.5]);
        assert_eq!(s.values()[2], 2.5e-12);

        let id = ds(&[&[1.0, 0.0], &[0.0, 1.0]], vec![1, -1]);
        let s = scores_osmac(&id, &[0.0, 0.0], OsmacVariant::Mse).unwrap();
        for v in s.values() {
            assert!((v - 4.0).abs() < 1e-12);
        }
        assert_eq!(s.probabilities(), vec![0.5, 0.5]);
    }

    #[test]
    fn singular_information() {
        let d = ds(&[&[1.0, 2.0], &[2.0, 4.0], &[-1.0, -2.0]], vec![1, -1, 1]);
        assert!(matches!(
            scores_osmac(&d, &[0.0, 0.0], OsmacVariant::Mse),
            Err(Error::SingularInformation { .. })
        ));
        assert!(scores_osmac(&d, &[0.0], OsmacVariant::Vc).is_err());
    }

    #[test]
    fn single_class_pilot_fails_after_retries() {
        let d = ds(&[&[1.0], &[2.0], &[3.0]], vec![1, 1, 1]);
        let r = pilot_estimate(&d, 2, 0, &FitConfig::default());
        assert!(matches!(r, Err(Error::DegeneratePilot { attempts: 10 })));
        assert!(matches!(pilot_estimate(&d, 1, 0, &FitConfig::default()), Err(Error::Config(_))));
    }

    #[test]
    fn pilot_recovers_coefficients() {
        let beta = [0.6, -0.4, 0.2, 0.5, -0.43];
        let norm: f64 = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
        let beta: Vec<f64> = beta.iter().map(|b| b / norm).collect();
        let d = crate::data::synthesize_logistic::<f64>(20_000, 5, &beta, 7).unwrap();
        let fit = pilot_estimate(&d, 5000, 11, &FitConfig::default()).unwrap();
        assert!(fit.converged);
        // Balancing shifts only the intercept; without one the slope stays close.
        let err: f64 = fit.beta.iter().zip(&beta).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err < 0.5, "pilot error {err}");
    }
}
