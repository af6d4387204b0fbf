use super::loss::Objective;
use super::{FitConfig, FitResult};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, Cholesky, Matrix};
use crate::Scalar;

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
const MAX_CD_SWEEPS: usize = 2000;

fn ensure_finite<T: Scalar>(v: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical("objective became non-finite".into()))
    }
}

/// Solves `H x = b`, adding a growing ridge to `H` until it factors.
fn damped_solve<T: Scalar>(h: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    if let Some(c) = Cholesky::factor(h) {
        return Ok(c.solve(b));
    }
    let d = h.nrows();
    let scale = (0..d).map(|i| h[(i, i)].abs()).fold(T::one(), T::max);
    let mut mu = T::of(1e-12) * scale;
    for _ in 0..30 {
        let mut damped = h.clone();
        for i in 0..d {
            damped[(i, i)] += mu;
        }
        if let Some(c) = Cholesky::factor(&damped) {
            return Ok(c.solve(b));
        }
        mu *= T::of(10.0);
    }
    Err(Error::Numerical("Hessian could not be regularized to positive definite".into()))
}

/// Damped Newton with backtracking line search, for λ₁ = 0.
pub(super) fn newton<T: Scalar>(obj: &Objective<'_, T>, cfg: &FitConfig) -> Result<FitResult<T>> {
    let tol = T::of(cfg.tol);
    let mut beta = vec![T::zero(); obj.dim()];
    let (f0, mut grad) = obj.smooth_value_and_gradient(&beta);
    let mut f = ensure_finite(f0)?;
    let mut history = vec![f];
    let mut gnorm = norm2(&grad);
    let mut iterations = 0;

    while gnorm > tol && iterations < cfg.max_iter {
        let h = obj.hessian(&beta);
        let neg_g: Vec<T> = grad.iter().map(|&g| -g).collect();
        let mut dir = damped_solve(&h, &neg_g)?;
        let mut slope = dot(&grad, &dir);
        if !(slope < T::zero()) {
            dir = neg_g;
            slope = -gnorm * gnorm;
        }

        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand: Vec<T> = beta.iter().zip(&dir).map(|(&b, &d)| b + step * d).collect();
            let fc = obj.smooth_value(&cand);
            if fc.is_finite() && (fc <= f + T::of(ARMIJO) * step * slope || (step == T::one() && fc <= f)) {
                accepted = Some((cand, fc));
                break;
            }
            step = step / T::of(2.0);
        }
        let Some((cand, fc)) = accepted else {
            break;
        };
        iterations += 1;
        beta = cand;
        f = fc;
        history.push(f);
        let (_, g) = obj.smooth_value_and_gradient(&beta);
        grad = g;
        gnorm = norm2(&grad);
    }

    Ok(FitResult {
        converged: gnorm <= tol,
        beta,
        iterations,
        objective: f,
        grad_norm: gnorm,
        history,
    })
}

/// Norm of the minimum-norm element of the subdifferential of `J`.
fn min_subgradient_norm<T: Scalar>(beta: &[T], grad: &[T], lambda1: T, penalized: &[bool]) -> T {
    let mut s = T::zero();
    for ((&b, &g), &p) in beta.iter().zip(grad).zip(penalized) {
        let r = if !p {
            g
        } else if b > T::zero() {
            g + lambda1
        } else if b < T::zero() {
            g - lambda1
        } else {
            (g.abs() - lambda1).max(T::zero())
        };
        s += r * r;
    }
    s.sqrt()
}

#[inline]
fn soft_threshold<T: Scalar>(u: T, t: T) -> T {
    if u > t {
        u - t
    } else if u < -t {
        u + t
    } else {
        T::zero()
    }
}

/// Coordinate descent on `gᵀ(z−β) + ½(z−β)ᵀH(z−β) + λ₁‖z‖₁` (penalized coordinates only).
fn lasso_quadratic<T: Scalar>(h: &Matrix<T>, grad: &[T], beta: &[T], lambda1: T, penalized: &[bool]) -> Vec<T> {
    let d = beta.len();
    let mut z = beta.to_vec();
    let mut hd = vec![T::zero(); d];
    let floor = T::of(1e-12);
    for _ in 0..MAX_CD_SWEEPS {
        let mut max_change = T::zero();
        for j in 0..d {
            let hjj = h[(j, j)].max(floor);
            let a = grad[j] + hd[j];
            let u = z[j] - a / hjj;
            let next = if penalized[j] { soft_threshold(u, lambda1 / hjj) } else { u };
            let delta = next - z[j];
            if delta != T::zero() {
                z[j] = next;
                for (k, hdk) in hd.iter_mut().enumerate() {
                    *hdk += h[(k, j)] * delta;
                }
                max_change = max_change.max(delta.abs());
            }
        }
        let zmax = z.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if max_change <= T::of(1e-15) * (T::one() + zmax) {
            break;
        }
    }
    z
}

/// Proximal Newton for λ₁ > 0. Coordinates set to zero by the soft
/// threshold stay exactly zero when the full step is accepted.
pub(super) fn proximal_newton<T: Scalar>(obj: &Objective<'_, T>, cfg: &FitConfig) -> Result<FitResult<T>> {
    let tol = T::of(cfg.tol);
    let lambda1 = obj.lambda1;
    let mut beta = vec![T::zero(); obj.dim()];
    let (s0, mut grad) = obj.smooth_value_and_gradient(&beta);
    let mut f = ensure_finite(s0 + obj.l1(&beta))?;
    let mut history = vec![f];
    let mut resid = min_subgradient_norm(&beta, &grad, lambda1, &obj.penalized);
    let mut iterations = 0;

    while resid > tol && iterations < cfg.max_iter {
        let h = obj.hessian(&beta);
        let z = lasso_quadratic(&h, &grad, &beta, lambda1, &obj.penalized);
        let dir: Vec<T> = z.iter().zip(&beta).map(|(&a, &b)| a - b).collect();
        let decrease = dot(&grad, &dir) + obj.l1(&z) - obj.l1(&beta);
        if !(decrease < T::zero()) {
            break;
        }
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand: Vec<T> = if step == T::one() {
                z.clone()
            } else {
                beta.iter().zip(&dir).map(|(&b, &d)| b + step * d).collect()
            };
            let fc = obj.value(&cand);
            if fc.is_finite() && (fc <= f + T::of(ARMIJO) * step * decrease || (step == T::one() && fc <= f)) {
                accepted = Some((cand, fc));
                break;
            }
            step = step / T::of(2.0);
        }
        let Some((cand, fc)) = accepted else {
            break;
        };
        iterations += 1;
        beta = cand;
        f = fc;
        history.push(f);
        grad = obj.smooth_value_and_gradient(&beta).1;
        resid = min_subgradient_norm(&beta, &grad, lambda1, &obj.penalized);
    }

    Ok(FitResult {
        converged: resid <= tol,
        beta,
        iterations,
        objective: f,
        grad_norm: resid,
        history,
    })
}
