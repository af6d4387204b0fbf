//! Quality of a coreset fit relative to the full-data fit.

use std::fmt;
use std::str::FromStr;

use crate::data::LabeledDataset;
use crate::error::{check_len, Error, Result};
use crate::glm::{nll, roc_auc};
use crate::linalg::Matrix;
use crate::Scalar;

/// Coordinates with magnitude at or below this count as zero.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSet<T> {
    pub rel_nll_error: T,
    pub coef_mse: T,
    pub rel_roc: T,
    /// Only computed for L1-regularized runs.
    pub support_accuracy: Option<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricName {
    RelNllError,
    CoefMse,
    RelRoc,
    SupportAcc,
}

impl MetricName {
    pub const ALL: [MetricName; 4] = [
        MetricName::RelNllError,
        MetricName::CoefMse,
        MetricName::RelRoc,
        MetricName::SupportAcc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::RelNllError => "rel_nll_error",
            MetricName::CoefMse => "coef_mse",
            MetricName::RelRoc => "rel_roc",
            MetricName::SupportAcc => "support_acc",
        }
    }

    pub fn get<T: Copy>(self, m: &MetricSet<T>) -> Option<T> {
        match self {
            MetricName::RelNllError => Some(m.rel_nll_error),
            MetricName::CoefMse => Some(m.coef_mse),
            MetricName::RelRoc => Some(m.rel_roc),
            MetricName::SupportAcc => m.support_accuracy,
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown metric `{s}`")))
    }
}

/// `|L(β_c) − L(β_full)| / L(β_full)` with `L` the unregularized training log-loss.
pub fn relative_nll_error<T: Scalar>(beta_c: &[T], beta_full: &[T], train: &LabeledDataset<T>) -> Result<T> {
    let full = nll(beta_full, train)?;
    if !(full > T::zero()) {
        return Err(Error::Degenerate("full-data log-loss is zero".into()));
    }
    Ok((nll(beta_c, train)? - full).abs() / full)
}

/// Squared Euclidean distance `‖β_c − β_full‖²` (not divided by the dimension).
pub fn coefficient_mse<T: Scalar>(beta_c: &[T], beta_full: &[T]) -> Result<T> {
    check_len(beta_full.len(), beta_c.len())?;
    Ok(beta_c.iter().zip(beta_full).map(|(&a, &b)| (a - b) * (a - b)).sum())
}

/// Ratio of held-out ROC-AUCs of the linear scores `xᵀβ_c` and `xᵀβ_full`.
pub fn relative_roc<T: Scalar>(beta_c: &[T], beta_full: &[T], test: &LabeledDataset<T>) -> Result<T> {
    let auc = |beta: &[T]| -> Result<T> { roc_auc(&linear_scores(test.x(), beta)?, test.y()) };
    let full = auc(beta_full)?;
    if full == T::zero() {
        return Err(Error::Degenerate("full-data ROC-AUC is zero".into()));
    }
    Ok(auc(beta_c)? / full)
}

fn linear_scores<T: Scalar>(x: &Matrix<T>, beta: &[T]) -> Result<Vec<T>> {
    x.matvec(beta)
}

/// Fraction of non-intercept coordinates on which both fits agree about being nonzero.
pub fn support_accuracy<T: Scalar>(beta_c: &[T], beta_full: &[T], has_intercept: bool) -> Result<T> {
    check_len(beta_full.len(), beta_c.len())?;
    let skip = usize::from(has_intercept);
    let d = beta_c.len().saturating_sub(skip);
    if d == 0 {
        return Err(Error::Config("support accuracy needs at least one non-intercept coefficient".into()));
    }
    let z = T::of(SUPPORT_THRESHOLD);
    let agree = beta_c[skip..]
        .iter()
        .zip(&beta_full[skip..])
        .filter(|(a, b)| (a.abs() > z) == (b.abs() > z))
        .count();
    Ok(T::of(agree as f64 / d as f64))
}

/// All metrics at once; support accuracy only when `with_support` is set.
pub fn evaluate<T: Scalar>(
    beta_c: &[T],
    beta_full: &[T],
    train: &LabeledDataset<T>,
    test: &LabeledDataset<T>,
    with_support: bool,
) -> Result<MetricSet<T>> {
    Ok(MetricSet {
        rel_nll_error: relative_nll_error(beta_c, beta_full, train)?,
        coef_mse: coefficient_mse(beta_c, beta_full)?,
        rel_roc: relative_roc(beta_c, beta_full, test)?,
        support_accuracy: if with_support {
            Some(support_accuracy(beta_c, beta_full, train.has_intercept())?)
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> LabeledDataset<f64> {
        let rows = [[0.3, 1.0], [1.2, -0.4], [-0.7, 0.2], [2.0, 0.1], [-1.5, -1.0], [0.1, 0.4]];
        LabeledDataset::new("m", Matrix::<f64>::from_f64_rows(&rows).unwrap(), vec![1, 1, -1, -1, -1, 1], false)
            .unwrap()
    }

    #[test]
    fn identity_values() {
        let ds = fixture();
        let b = [0.4, 1.1];
        let m = evaluate(&b, &b, &ds, &ds, true).unwrap();
        assert_eq!(
            m,
            MetricSet {
                rel_nll_error: 0.0,
                coef_mse: 0.0,
                rel_roc: 1.0,
                support_accuracy: Some(1.0)
            }
        );
    }

    #[test]
    fn relative_nll_example() {
        // Single positive row x = 1: find b with log(1 + e^{-b}) = 1.1 log 2.
        let ds = LabeledDataset::new("n", Matrix::<f64>::from_f64_rows(&[[1.0]]).unwrap(), vec![1], false).unwrap();
        let target = 1.1 * 2f64.ln();
        let b = -(target.exp() - 1.0).ln();
        let r = relative_nll_error(&[b], &[0.0], &ds).unwrap();
        assert!((r - 0.1).abs() < 1e-12);
        let perfect = LabeledDataset::new("n", Matrix::<f64>::from_f64_rows(&[[1.0]]).unwrap(), vec![1], false).unwrap();
        assert!(matches!(relative_nll_error(&[0.0], &[1e6], &perfect), Err(Error::Degenerate(_))));
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(coefficient_mse(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2.0);
        assert_eq!(coefficient_mse(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 25.0);
        assert!(coefficient_mse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn roc_scaling_and_negation() {
        let ds = fixture();
        let b = [0.4, 1.1];
        assert!((relative_roc(&[0.8, 2.2], &b, &ds).unwrap() - 1.0).abs() < 1e-15);
        let a = roc_auc(&ds.x().matvec(&b).unwrap(), ds.y()).unwrap();
        let neg = relative_roc(&[-0.4, -1.1], &b, &ds).unwrap();
        assert!((neg - (1.0 - a) / a).abs() < 1e-12);
    }

    #[test]
    fn support_examples() {
        let mut full = vec![0.0; 10];
        full[1] = 0.5;
        full[4] = -2.0;
        full[9] = 1e-3;
        assert!((support_accuracy(&[0.0f64; 10], &full, false).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(support_accuracy(&[9.0, 1.0, 0.0, 1.0, 0.0], &[-9.0, 0.0, 1.0, 0.0, 1.0], true).unwrap(), 0.0);
        assert_eq!(support_accuracy(&[0.0, 1e-9], &[0.0, 0.0], false).unwrap(), 1.0);
    }

    #[test]
    fn metric_tokens() {
        for m in MetricName::ALL {
            assert_eq!(m.as_str().parse::<MetricName>().unwrap(), m);
        }
    }
}
