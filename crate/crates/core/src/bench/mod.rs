//! Replicated subsampling experiments.
//!
//! For every dataset the full-data fit is computed once. Each
//! (method, size, replication) task then scores the training rows, draws a
//! weighted coreset, fits on it and compares the fit with the full-data fit.
//! Tasks are seeded independently (see [`derive_seed`]), so the records are
//! a pure function of the config whatever the thread count.

mod aggregate;
mod config;
mod grid;
mod records;
mod seed;
mod stats;

use std::time::Instant;

use rayon::prelude::*;

pub use aggregate::{aggregate, quantile, write_aggregates, AggregateRecord, AGGREGATES_HEADER};
pub use config::{DatasetSpec, ExperimentConfig, GridConfig};
pub use grid::size_grid;
pub use records::{read_results, write_results, ResultRecord, RESULTS_HEADER};
pub use seed::{derive_seed, substream};
pub use stats::{
    compare_report, kruskal_dunn, kruskal_report, observations, write_comparisons, write_kruskal, ComparisonRow,
    DunnPair, DunnTable, Family, KruskalResult, KruskalRow, BASELINE, COMPARISONS_HEADER, KRUSKAL_HEADER,
};

use crate::data::SplitDataset;
use crate::error::{Error, Result};
use crate::glm::{fit_full, fit_weighted, FitResult};
use crate::metrics::{evaluate, MetricSet};
use crate::samplers::{compute_scores, sample_coreset, Method, SamplerConfig, ScoreOutcome};

/// Loads every dataset and runs the experiment on `parallelism` threads.
pub fn run_experiment(cfg: &ExperimentConfig, parallelism: usize) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let data = cfg
        .datasets
        .iter()
        .map(|d| d.load(cfg.base_seed))
        .collect::<Result<Vec<_>>>()?;
    run_on(cfg, &data, parallelism)
}

/// Runs the experiment on already loaded splits, one per configured dataset,
/// named after their training sets.
pub fn run_on(cfg: &ExperimentConfig, data: &[SplitDataset<f64>], parallelism: usize) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| {
        let mut out = Vec::new();
        for split in data {
            out.extend(run_dataset(cfg, split)?);
        }
        Ok(out)
    })
}

struct Task<'a> {
    sampler: &'a SamplerConfig,
    size: usize,
    rep: usize,
}

fn run_dataset(cfg: &ExperimentConfig, split: &SplitDataset<f64>) -> Result<Vec<ResultRecord>> {
    let name = split.train.name();
    let train = &split.train;
    let full = fit_full(train, &cfg.fit)?;
    if !full.converged {
        log::warn!(
            "full-data fit on `{name}` stopped after {} iterations (gradient norm {:e})",
            full.iterations,
            full.grad_norm
        );
    }
    let sizes = size_grid(cfg.grid.size_lo, cfg.grid.size_hi, cfg.grid.size_count, train.n())?;
    log::info!("`{name}`: n={}, d={}, sizes {sizes:?}", train.n(), train.d());

    // Scores that do not depend on the task are computed once; k-means
    // scores are shared by all sizes of a replication.
    let fixed: Vec<Option<Result<ScoreOutcome<f64>>>> = cfg
        .methods
        .par_iter()
        .map(|s| {
            (!s.method.is_randomized() && !cfg.identity_mode)
                .then(|| compute_scores(train, s, sizes[0], &cfg.fit, 0))
        })
        .collect();
    let kmeans: Vec<Option<Vec<Result<ScoreOutcome<f64>>>>> = cfg
        .methods
        .iter()
        .map(|s| {
            (s.method == Method::Kmeans && !cfg.identity_mode).then(|| {
                (0..cfg.replications)
                    .into_par_iter()
                    .map(|rep| {
                        let seed = derive_seed(cfg.base_seed, name, s.method.as_str(), 0, rep);
                        compute_scores(train, s, sizes[0], &cfg.fit, substream(seed, "kmeans"))
                    })
                    .collect()
            })
        })
        .collect();

    let tasks: Vec<(usize, Task)> = cfg
        .methods
        .iter()
        .enumerate()
        .flat_map(|(mi, sampler)| {
            sizes.iter().flat_map(move |&size| {
                (0..cfg.replications).map(move |rep| (mi, Task { sampler, size, rep }))
            })
        })
        .collect();

    Ok(tasks
        .par_iter()
        .map(|(mi, task)| {
            let start = Instant::now();
            let cached = fixed[*mi]
                .as_ref()
                .or_else(|| kmeans[*mi].as_ref().map(|per_rep| &per_rep[task.rep]));
            let outcome = run_task(cfg, split, &full, task, cached);
            let wall_time_ms = if cfg.record_wall_time {
                start.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            let (metrics, fallback_used, error) = match outcome {
                Ok((m, fallback)) => (Some(m), fallback, None),
                Err(kind) => (None, false, Some(kind.to_string())),
            };
            ResultRecord {
                dataset: name.to_string(),
                method: task.sampler.method.as_str().to_string(),
                size: task.size,
                rep: task.rep,
                metrics,
                wall_time_ms,
                fallback_used,
                error,
            }
        })
        .collect())
}

fn run_task(
    cfg: &ExperimentConfig,
    split: &SplitDataset<f64>,
    full: &FitResult<f64>,
    task: &Task,
    cached: Option<&Result<ScoreOutcome<f64>>>,
) -> std::result::Result<(MetricSet<f64>, bool), &'static str> {
    let tag = |e: Error| {
        log::debug!(
            "{}/{}/{}/{}: {e}",
            split.train.name(),
            task.sampler.method,
            task.size,
            task.rep
        );
        e.kind()
    };
    let train = &split.train;
    let with_support = cfg.l1_mode;
    if cfg.identity_mode {
        let fit = fit_weighted(train, &vec![1.0; train.n()], &cfg.fit).map_err(tag)?;
        let metrics = evaluate(&fit.beta, &full.beta, train, &split.test, with_support).map_err(tag)?;
        return Ok((metrics, false));
    }
    let method = task.sampler.method.as_str();
    let seed = derive_seed(cfg.base_seed, train.name(), method, task.size, task.rep);
    let computed;
    let outcome = match cached {
        Some(Ok(o)) => o,
        Some(Err(e)) => return Err(e.kind()),
        None => {
            computed =
                compute_scores(train, task.sampler, task.size, &cfg.fit, substream(seed, "pilot")).map_err(tag)?;
            &computed
        }
    };
    let coreset = sample_coreset(&outcome.scores, task.size, substream(seed, "sample")).map_err(tag)?;
    let subset = train.select_rows(&coreset.indices);
    let fit = fit_weighted(&subset, &coreset.weights, &cfg.fit).map_err(tag)?;
    let metrics = evaluate(&fit.beta, &full.beta, train, &split.test, with_support).map_err(tag)?;
    Ok((metrics, outcome.fallback_used))
}
