//! Subsampling and coreset constructions for logistic regression.
//!
//! The crate covers the whole pipeline of a subsampling benchmark:
//!
//! * [`data`]: labeled datasets, CSV ingestion with one-hot encoding and
//!   min-max scaling, and a synthetic logistic generator.
//! * [`linalg`]: dense matrices, pivoted QR, leverage scores and
//!   ℓ1 Lewis weights.
//! * [`glm`]: weighted L2/L1-regularized logistic regression, the
//!   log-loss and ROC-AUC.
//! * [`samplers`]: the seven sampling score functions (`uniform`, `kmeans`,
//!   `leverage`, `monotonic`, `lewis`, `osmac_vc`, `osmac_mse`) and the
//!   importance-sampling draw with inverse-probability weights.
//! * [`metrics`]: comparisons of a subsampled fit with the full-data fit.
//! * [`bench`]: size grids, replicated experiments, aggregation and the
//!   Kruskal–Wallis / Dunn comparisons.
//!
//! The numerical modules are generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix the element type to `f64`, which is what the
//! benchmark harness uses.

pub mod bench;
pub mod data;
mod error;
pub mod glm;
pub mod linalg;
pub mod metrics;
pub mod samplers;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = linalg::Matrix<f64>;
pub type Dataset = data::LabeledDataset<f64>;
pub type Split = data::SplitDataset<f64>;
pub type Fit = glm::FitResult<f64>;
pub type Scores = samplers::ScoreVector<f64>;
pub type Coreset = samplers::CoresetSample<f64>;
pub type Metrics = metrics::MetricSet<f64>;
