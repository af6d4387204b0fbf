//! Sampling scores for each subsampling method, and the importance-sampling
//! draw that turns scores into a weighted coreset.
//!
//! Every method produces a strictly positive score per row. Rows are then
//! drawn i.i.d. with probability `p_i = s_i / Σ s` and each draw `c_j` gets
//! the instance weight `1 / (p_{c_j} n)`.

mod kmeans;
mod osmac;
mod sample;
mod scores;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use kmeans::scores_kmeans;
pub use osmac::{balanced_class_weights, pilot_estimate, scores_osmac, OsmacVariant};
pub use sample::{sample_coreset, CoresetSample};
pub use scores::{scores_leverage, scores_lewis, scores_monotonic, scores_uniform};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::glm::FitConfig;
use crate::Scalar;

/// Relative floor applied to zero scores: `1e-12 · max_i s_i`.
pub const SCORE_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Uniform,
    Kmeans,
    Leverage,
    Monotonic,
    Lewis,
    OsmacVc,
    OsmacMse,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Uniform,
        Method::Kmeans,
        Method::Leverage,
        Method::Monotonic,
        Method::Lewis,
        Method::OsmacVc,
        Method::OsmacMse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Uniform => "uniform",
            Method::Kmeans => "kmeans",
            Method::Leverage => "leverage",
            Method::Monotonic => "monotonic",
            Method::Lewis => "lewis",
            Method::OsmacVc => "osmac_vc",
            Method::OsmacMse => "osmac_mse",
        }
    }

    /// Whether the scores depend on a random stream (clustering or pilot draw).
    pub fn is_randomized(self) -> bool {
        matches!(self, Method::Kmeans | Method::OsmacVc | Method::OsmacMse)
    }

    /// Whether the scores depend on the subsample size.
    pub fn depends_on_size(self) -> bool {
        matches!(self, Method::OsmacVc | Method::OsmacMse)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Strictly positive per-row sampling scores.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector<T> {
    values: Vec<T>,
    method: Method,
}

impl<T: Scalar> ScoreVector<T> {
    /// Validates raw scores and lifts zeros to `SCORE_FLOOR · max`.
    pub fn new(raw: Vec<T>, method: Method) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Config("cannot score an empty dataset".into()));
        }
        if let Some(i) = raw.iter().position(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::Numerical(format!("{method} score of row {i} is {}", raw[i])));
        }
        let max = raw.iter().copied().fold(T::zero(), T::max);
        if max == T::zero() {
            return Err(Error::Degenerate(format!("all {method} scores are zero")));
        }
        let floor = T::of(SCORE_FLOOR) * max;
        let values = raw.into_iter().map(|v| v.max(floor)).collect();
        Ok(Self { values, method })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `p_i = s_i / Σ s`.
    pub fn probabilities(&self) -> Vec<T> {
        let total: T = self.values.iter().copied().sum();
        self.values.iter().map(|&s| s / total).collect()
    }
}

/// Method selection plus its tuning knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub method: Method,
    #[serde(default = "default_k")]
    pub kmeans_k: usize,
    /// Radius `R` of the parameter ball in the k-means sensitivity bound.
    #[serde(default = "default_r", alias = "kmeans_R")]
    pub kmeans_r: f64,
    /// Rows clustered; defaults to `min(n, 10000)`.
    #[serde(default)]
    pub kmeans_cluster_subsample: Option<usize>,
    #[serde(default = "default_t")]
    pub lewis_t: usize,
    /// Pilot size as a fraction of the subsample size.
    #[serde(default = "default_pilot")]
    pub pilot_fraction: f64,
    #[serde(default)]
    pub leverage_binning: bool,
    /// L2 strength entering the monotonic bound; defaults to the fit's λ₂.
    #[serde(default)]
    pub lambda_for_monotonic: Option<f64>,
    /// Fall back from `osmac_mse` to `osmac_vc` when the information matrix is singular.
    #[serde(default)]
    pub osmac_fallback: bool,
}

fn default_k() -> usize {
    6
}

fn default_r() -> f64 {
    1.0
}

fn default_t() -> usize {
    5
}

fn default_pilot() -> f64 {
    0.5
}

impl SamplerConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            kmeans_k: default_k(),
            kmeans_r: default_r(),
            kmeans_cluster_subsample: None,
            lewis_t: default_t(),
            pilot_fraction: default_pilot(),
            leverage_binning: false,
            lambda_for_monotonic: None,
            osmac_fallback: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kmeans_k == 0 || !(self.kmeans_r > 0.0) {
            return Err(Error::Config("kmeans_k must be >= 1 and kmeans_r > 0".into()));
        }
        if self.lewis_t == 0 {
            return Err(Error::Config("lewis_t must be >= 1".into()));
        }
        if !(self.pilot_fraction > 0.0 && self.pilot_fraction <= 1.0) {
            return Err(Error::Config("pilot_fraction must lie in (0, 1]".into()));
        }
        if let Some(l) = self.lambda_for_monotonic {
            if !(l > 0.0) {
                return Err(Error::Config("lambda_for_monotonic must be positive".into()));
            }
        }
        Ok(())
    }

    /// Pilot size for a subsample of `m` rows: `⌈pilot_fraction · m⌉`, at least 2.
    pub fn pilot_size(&self, m: usize) -> usize {
        ((self.pilot_fraction * m as f64).ceil() as usize).max(2)
    }
}

/// Scores plus a flag recording whether the OSMAC fallback fired.
#[derive(Clone, Debug)]
pub struct ScoreOutcome<T> {
    pub scores: ScoreVector<T>,
    pub fallback_used: bool,
}

/// Runs the configured score function. `m` is the intended subsample size
/// (it sets the OSMAC pilot size); `seed` drives clustering and pilot draws.
pub fn compute_scores<T: Scalar>(
    ds: &LabeledDataset<T>,
    cfg: &SamplerConfig,
    m: usize,
    fit: &FitConfig,
    seed: u64,
) -> Result<ScoreOutcome<T>> {
    cfg.validate()?;
    let plain = |scores| ScoreOutcome {
        scores,
        fallback_used: false,
    };
    match cfg.method {
        Method::Uniform => Ok(plain(scores_uniform(ds)?)),
        Method::Kmeans => {
            let sub = cfg.kmeans_cluster_subsample.unwrap_or(10_000).min(ds.n());
            Ok(plain(scores_kmeans(ds, cfg.kmeans_k, cfg.kmeans_r, sub, seed)?))
        }
        Method::Leverage => Ok(plain(scores_leverage(ds, cfg.leverage_binning)?)),
        Method::Monotonic => Ok(plain(scores_monotonic(ds, cfg.lambda_for_monotonic.unwrap_or(fit.lambda2))?)),
        Method::Lewis => Ok(plain(scores_lewis(ds, cfg.lewis_t)?)),
        Method::OsmacVc | Method::OsmacMse => {
            let pilot = pilot_estimate(ds, cfg.pilot_size(m), seed, fit)?;
            if cfg.method == Method::OsmacVc {
                return Ok(plain(scores_osmac(ds, &pilot.beta, OsmacVariant::Vc)?));
            }
            match scores_osmac(ds, &pilot.beta, OsmacVariant::Mse) {
                Err(Error::SingularInformation { condition }) if cfg.osmac_fallback => {
                    log::warn!(
                        "osmac_mse information matrix singular (condition {condition:e}) on `{}`; using osmac_vc scores",
                        ds.name()
                    );
                    let vc = scores_osmac(ds, &pilot.beta, OsmacVariant::Vc)?;
                    Ok(ScoreOutcome {
                        scores: ScoreVector::new(vc.values().to_vec(), Method::OsmacMse)?,
                        fallback_used: true,
                    })
                }
                other => other.map(plain),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_tokens_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn zero_scores_are_floored() {
        let s = ScoreVector::new(vec![0.0, 2.0, 4.0], Method::OsmacVc).unwrap();
        assert_eq!(s.values()[0], 4e-12);
        let p = s.probabilities();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(ScoreVector::new(vec![0.0, 0.0], Method::Uniform).is_err());
        assert!(ScoreVector::new(vec![1.0, -1.0], Method::Uniform).is_err());
        assert!(ScoreVector::new(vec![1.0, f64::NAN], Method::Uniform).is_err());
    }

    #[test]
    fn defaults() {
        let c: SamplerConfig = serde_json::from_str(r#"{"method":"kmeans"}"#).unwrap();
        assert_eq!((c.kmeans_k, c.kmeans_r, c.lewis_t, c.pilot_fraction), (6, 1.0, 5, 0.5));
        assert_eq!(c.pilot_size(1000), 500);
        assert_eq!(c.pilot_size(3), 2);
    }
}
