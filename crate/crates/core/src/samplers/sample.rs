use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ScoreVector;
use crate::error::{Error, Result};
use crate::Scalar;

/// Row indices drawn with replacement plus their importance weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CoresetSample<T> {
    /// Drawn rows `c_j`, in draw order.
    pub indices: Vec<usize>,
    /// `w_j = 1 / (p_{c_j} n)`.
    pub weights: Vec<T>,
    /// Sampling distribution over all `n` rows.
    pub probabilities: Vec<T>,
}

/// Draws `m` rows i.i.d. from `p_i = s_i / Σ s`.
pub fn sample_coreset<T: Scalar>(scores: &ScoreVector<T>, m: usize, seed: u64) -> Result<CoresetSample<T>> {
    if m == 0 {
        return Err(Error::Config("coreset size must be at least 1".into()));
    }
    let probabilities = scores.probabilities();
    let n = T::of(probabilities.len() as f64);
    let dist = WeightedIndex::new(probabilities.iter().map(|p| p.as_f64()))
        .map_err(|e| Error::Numerical(format!("invalid sampling distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices: Vec<usize> = (0..m).map(|_| dist.sample(&mut rng)).collect();
    let weights = indices.iter().map(|&i| T::one() / (probabilities[i] * n)).collect();
    Ok(CoresetSample {
        indices,
        weights,
        probabilities,
    })
}
