use super::FitConfig;
use crate::data::LabeledDataset;
use crate::error::{check_len, Result};
use crate::linalg::{dot, Matrix};
use crate::Scalar;

/// `σ(t) = 1/(1 + e^{-t})`, evaluated without overflow.
#[inline]
pub fn sigmoid<T: Scalar>(t: T) -> T {
    if t >= T::zero() {
        T::one() / (T::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (T::one() + e)
    }
}

/// `f(t) = log(1 + e^{-t})`, evaluated without overflow.
#[inline]
pub fn logistic_loss<T: Scalar>(t: T) -> T {
    if t > T::zero() {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

#[inline]
fn margin<T: Scalar>(row: &[T], y: i8, beta: &[T]) -> T {
    let m = dot(row, beta);
    if y > 0 {
        m
    } else {
        -m
    }
}

/// Per-row losses `f(y_i x_iᵀβ)`.
pub fn row_losses<T: Scalar>(beta: &[T], ds: &LabeledDataset<T>) -> Result<Vec<T>> {
    check_len(ds.d(), beta.len())?;
    Ok(ds
        .x()
        .rows()
        .zip(ds.y())
        .map(|(r, &y)| logistic_loss(margin(r, y, beta)))
        .collect())
}

/// Unregularized negative log-likelihood `Σ_i f(y_i x_iᵀβ)`.
pub fn nll<T: Scalar>(beta: &[T], ds: &LabeledDataset<T>) -> Result<T> {
    Ok(row_losses(beta, ds)?.into_iter().sum())
}

/// `σ(x_iᵀβ)` for every row.
pub fn predict_proba<T: Scalar>(beta: &[T], x: &Matrix<T>) -> Result<Vec<T>> {
    Ok(x.matvec(beta)?.into_iter().map(sigmoid).collect())
}

/// The weighted regularized objective bound to one dataset.
pub(super) struct Objective<'a, T> {
    x: &'a Matrix<T>,
    y: &'a [i8],
    w: &'a [T],
    scale: T,
    lambda2: T,
    pub(super) lambda1: T,
    pub(super) penalized: Vec<bool>,
}

impl<'a, T: Scalar> Objective<'a, T> {
    pub(super) fn new(ds: &'a LabeledDataset<T>, w: &'a [T], cfg: &FitConfig) -> Self {
        let mut penalized = vec![true; ds.d()];
        if ds.has_intercept() {
            penalized[0] = false;
        }
        Self {
            x: ds.x(),
            y: ds.y(),
            w,
            scale: T::one() / T::of(2.0 * ds.n() as f64),
            lambda2: T::of(cfg.lambda2),
            lambda1: T::of(cfg.lambda1),
            penalized,
        }
    }

    pub(super) fn dim(&self) -> usize {
        self.penalized.len()
    }

    pub(super) fn l1(&self, beta: &[T]) -> T {
        if self.lambda1 == T::zero() {
            return T::zero();
        }
        let s: T = beta.iter().zip(&self.penalized).filter(|(_, &p)| p).map(|(b, _)| b.abs()).sum();
        self.lambda1 * s
    }

    fn l2(&self, beta: &[T]) -> T {
        let s: T = beta.iter().zip(&self.penalized).filter(|(_, &p)| p).map(|(b, _)| *b * *b).sum();
        self.lambda2 * s
    }

    pub(super) fn smooth_value(&self, beta: &[T]) -> T {
        let mut data = T::zero();
        for ((r, &y), &w) in self.x.rows().zip(self.y).zip(self.w) {
            if w != T::zero() {
                data += w * logistic_loss(margin(r, y, beta));
            }
        }
        self.scale * data + self.l2(beta)
    }

    pub(super) fn value(&self, beta: &[T]) -> T {
        self.smooth_value(beta) + self.l1(beta)
    }

    pub(super) fn smooth_value_and_gradient(&self, beta: &[T]) -> (T, Vec<T>) {
        let mut data = T::zero();
        let mut grad = vec![T::zero(); self.dim()];
        for ((r, &y), &w) in self.x.rows().zip(self.y).zip(self.w) {
            if w == T::zero() {
                continue;
            }
            let m = margin(r, y, beta);
            data += w * logistic_loss(m);
            // d/dβ f(y xᵀβ) = -σ(-m) · y · x
            let coef = -w * sigmoid(-m) * if y > 0 { T::one() } else { -T::one() };
            for (g, &xv) in grad.iter_mut().zip(r) {
                *g += coef * xv;
            }
        }
        let two = T::of(2.0);
        for ((g, &b), &p) in grad.iter_mut().zip(beta).zip(&self.penalized) {
            *g *= self.scale;
            if p {
                *g += two * self.lambda2 * b;
            }
        }
        (self.scale * data + self.l2(beta), grad)
    }

    pub(super) fn hessian(&self, beta: &[T]) -> Matrix<T> {
        let d = self.dim();
        let mut h = Matrix::zeros(d, d);
        for ((r, &y), &w) in self.x.rows().zip(self.y).zip(self.w) {
            if w == T::zero() {
                continue;
            }
            let s = sigmoid(margin(r, y, beta));
            let c = w * s * (T::one() - s);
            if c == T::zero() {
                continue;
            }
            for a in 0..d {
                let ca = c * r[a];
                if ca == T::zero() {
                    continue;
                }
                let hrow = h.row_mut(a);
                for b in a..d {
                    hrow[b] += ca * r[b];
                }
            }
        }
        let two = T::of(2.0);
        for a in 0..d {
            for b in a..d {
                let v = h[(a, b)] * self.scale;
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
            if self.penalized[a] {
                h[(a, a)] += two * self.lambda2;
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proba_examples() {
        let x = Matrix::<f64>::from_f64_rows(&[[0.5], [3.0]]).unwrap();
        assert_eq!(predict_proba(&[0.0], &x).unwrap(), vec![0.5, 0.5]);
        let p = predict_proba(&[1.0], &x).unwrap();
        assert!((p[0] - 1.0 / (1.0 + (-0.5f64).exp())).abs() < 1e-15);
        assert!((p[0] - 0.622_459_331_201_854_6).abs() < 1e-15);
        let big = predict_proba(&[1000.0], &Matrix::<f64>::from_f64_rows(&[[1.0]]).unwrap()).unwrap()[0];
        assert!(big.is_finite() && big <= 1.0 && big > 1.0 - 1e-12);
        let small = sigmoid(-1000.0f64);
        assert!(small.is_finite() && small >= 0.0);
        assert!(predict_proba(&[1.0, 2.0], &x).is_err());
    }

    #[test]
    fn nll_examples() {
        let x = Matrix::<f64>::from_f64_rows(&[[1.0], [2.0], [-3.0]]).unwrap();
        let ds = LabeledDataset::new("t", x, vec![1, -1, 1], false).unwrap();
        assert!((nll(&[0.0], &ds).unwrap() - 3.0 * 2f64.ln()).abs() < 1e-14);

        let one = LabeledDataset::new("t", Matrix::<f64>::from_f64_rows(&[[1.0]]).unwrap(), vec![1], false).unwrap();
        assert!(nll(&[1000.0], &one).unwrap() < 1e-300);
        let wrong = nll(&[-1e4], &one).unwrap();
        assert!((wrong - 1e4).abs() < 1e-9);

        // Margins +1 and -1.
        let two = LabeledDataset::new("t", Matrix::<f64>::from_f64_rows(&[[1.0], [1.0]]).unwrap(), vec![1, -1], false)
            .unwrap();
        let expected = (1.0 + (-1f64).exp()).ln() + (1.0 + 1f64.exp()).ln();
        assert!((expected - 1.626_523_38).abs() < 1e-8);
        assert!((nll(&[1.0], &two).unwrap() - expected).abs() < 1e-14);
        assert!(nll(&[1.0, 0.0], &two).is_err());
    }
}
