//! Weighted, regularized logistic regression.
//!
//! The fitted objective for `m` rows with instance weights `w` is
//!
//! ```text
//! J(β) = 1/(2m) Σ_j w_j f(y_j x_jᵀβ) + λ₂‖β‖₂² + λ₁‖β‖₁,   f(t) = log(1 + e^{-t})
//! ```
//!
//! with the intercept coordinate (column 0 when the dataset carries one)
//! left out of both penalties. With `w ≡ 1` this is the full-data objective.

mod auc;
mod loss;
mod solver;

use serde::{Deserialize, Serialize};

pub use auc::roc_auc;
pub use loss::{logistic_loss, nll, predict_proba, row_losses, sigmoid};

use crate::data::LabeledDataset;
use crate::error::{check_len, Error, Result};
use crate::Scalar;
use loss::Objective;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// L2 strength λ₂.
    pub lambda2: f64,
    /// L1 strength λ₁.
    pub lambda1: f64,
    /// Optimality tolerance on the gradient norm (minimal subgradient norm with L1).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            lambda2: 1e-5,
            lambda1: 0.0,
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda2 >= 0.0 && self.lambda2.is_finite()) || !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            return Err(Error::Config("regularization strengths must be finite and nonnegative".into()));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Config("tol must be positive and max_iter at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FitResult<T> {
    pub beta: Vec<T>,
    pub converged: bool,
    pub iterations: usize,
    /// Objective value at `beta`.
    pub objective: T,
    /// Gradient norm, or minimal subgradient norm when λ₁ > 0.
    pub grad_norm: T,
    /// Objective values of the accepted iterates, starting at β = 0.
    pub history: Vec<T>,
}

/// Minimizes the weighted regularized objective starting from β = 0.
///
/// Running out of iterations is reported through `converged = false`.
pub fn fit_weighted<T: Scalar>(ds: &LabeledDataset<T>, weights: &[T], config: &FitConfig) -> Result<FitResult<T>> {
    let obj = objective_for(ds, weights, config)?;
    if config.lambda1 > 0.0 {
        solver::proximal_newton(&obj, config)
    } else {
        solver::newton(&obj, config)
    }
}

/// Unit-weight fit on every row.
pub fn fit_full<T: Scalar>(ds: &LabeledDataset<T>, config: &FitConfig) -> Result<FitResult<T>> {
    fit_weighted(ds, &vec![T::one(); ds.n()], config)
}

/// Value of the regularized objective `J(β)`.
pub fn objective<T: Scalar>(ds: &LabeledDataset<T>, weights: &[T], config: &FitConfig, beta: &[T]) -> Result<T> {
    let obj = objective_for(ds, weights, config)?;
    check_len(ds.d(), beta.len())?;
    Ok(obj.value(beta))
}

/// Analytic gradient of the smooth part of `J` (everything except λ₁‖β‖₁).
pub fn objective_gradient<T: Scalar>(
    ds: &LabeledDataset<T>,
    weights: &[T],
    config: &FitConfig,
    beta: &[T],
) -> Result<Vec<T>> {
    let obj = objective_for(ds, weights, config)?;
    check_len(ds.d(), beta.len())?;
    Ok(obj.smooth_value_and_gradient(beta).1)
}

fn objective_for<'a, T: Scalar>(
    ds: &'a LabeledDataset<T>,
    weights: &'a [T],
    config: &FitConfig,
) -> Result<Objective<'a, T>> {
    config.validate()?;
    check_len(ds.n(), weights.len())?;
    if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
        return Err(Error::Config("weights must be finite and nonnegative".into()));
    }
    if weights.iter().all(|w| *w == T::zero()) {
        return Err(Error::Config("weights are all zero".into()));
    }
    Ok(Objective::new(ds, weights, config))
}
