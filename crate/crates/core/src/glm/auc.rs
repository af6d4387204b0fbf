use crate::error::{check_len, Error, Result};
use crate::Scalar;

/// Rank-based ROC-AUC with midranks for tied scores:
/// `(R⁺ − n⁺(n⁺+1)/2) / (n⁺ n⁻)`.
pub fn roc_auc<T: Scalar>(scores: &[T], y: &[i8]) -> Result<T> {
    check_len(scores.len(), y.len())?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Numerical("NaN score".into()));
    }
    let n_pos = y.iter().filter(|&&v| v > 0).count();
    let n_neg = y.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateLabels(format!("{n_pos} positives and {n_neg} negatives")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("no NaN"));

    let mut rank_sum_pos = 0.0f64;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // 1-based ranks start+1 ..= end share their mean.
        let midrank = (start + 1 + end) as f64 / 2.0;
        let pos_in_group = order[start..end].iter().filter(|&&i| y[i] > 0).count();
        rank_sum_pos += midrank * pos_in_group as f64;
        start = end;
    }
    let np = n_pos as f64;
    let u = rank_sum_pos - np * (np + 1.0) / 2.0;
    Ok(T::of(u / (np * n_neg as f64)))
}
