use crate::error::{Error, Result};

/// `count` sizes spaced geometrically from `lo` to `hi`, rounded to the
/// nearest integer, de-duplicated in order and capped at `n_train`.
pub fn size_grid(lo: usize, hi: usize, count: usize, n_train: usize) -> Result<Vec<usize>> {
    if lo == 0 || lo > hi || count < 2 {
        return Err(Error::Config(format!(
            "size grid needs 1 <= lo <= hi and count >= 2, got lo={lo}, hi={hi}, count={count}"
        )));
    }
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (count - 1) as f64);
    let mut sizes: Vec<usize> = Vec::with_capacity(count);
    for i in 0..count {
        let s = if i == count - 1 {
            hi
        } else {
            (lo as f64 * ratio.powi(i as i32)).round() as usize
        };
        if sizes.last() != Some(&s) {
            sizes.push(s);
        }
    }
    sizes.retain(|&s| s <= n_train);
    if sizes.is_empty() {
        return Err(Error::Config(format!(
            "no subsample size in [{lo}, {hi}] fits {n_train} training rows"
        )));
    }
    Ok(sizes)
}
