use std::collections::HashSet;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize};

use super::seed::substream;
use crate::data::{load_csv, read_prepared, split_dataset, synthesize_logistic, PreprocessSpec, SplitDataset};
use crate::error::{Error, Result};
use crate::glm::FitConfig;
use crate::samplers::{Method, SamplerConfig};

/// Where a benchmark dataset comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    /// Gaussian features with logistic labels.
    Synthetic {
        name: String,
        n: usize,
        d: usize,
        /// True coefficients; defaults to a seeded random unit vector.
        #[serde(default)]
        beta: Option<Vec<f64>>,
        /// Generator seed; defaults to one derived from the base seed.
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default = "default_test_fraction")]
        test_fraction: f64,
        #[serde(default = "yes")]
        intercept: bool,
    },
    /// A raw delimited file preprocessed on load.
    Csv {
        name: String,
        path: PathBuf,
        preprocess: PreprocessSpec,
        #[serde(default = "yes")]
        intercept: bool,
    },
    /// A directory written by the `prep` command.
    Prepared {
        name: String,
        dir: PathBuf,
        #[serde(default = "yes")]
        intercept: bool,
    },
}

fn default_test_fraction() -> f64 {
    0.05
}

fn yes() -> bool {
    true
}

impl DatasetSpec {
    pub fn name(&self) -> &str {
        match self {
            DatasetSpec::Synthetic { name, .. } | DatasetSpec::Csv { name, .. } | DatasetSpec::Prepared { name, .. } => {
                name
            }
        }
    }

    fn intercept(&self) -> bool {
        match self {
            DatasetSpec::Synthetic { intercept, .. }
            | DatasetSpec::Csv { intercept, .. }
            | DatasetSpec::Prepared { intercept, .. } => *intercept,
        }
    }

    /// Seed of the train/test shuffle for this dataset.
    pub fn split_seed(&self, base_seed: u64) -> u64 {
        substream(base_seed, &format!("split\x1f{}", self.name()))
    }

    /// Loads the raw (unprepared) split without an intercept column.
    pub fn load_raw(&self, base_seed: u64) -> Result<SplitDataset<f64>> {
        match self {
            DatasetSpec::Synthetic {
                name,
                n,
                d,
                beta,
                seed,
                test_fraction,
                ..
            } => {
                let seed = seed.unwrap_or_else(|| substream(base_seed, &format!("synthetic\x1f{name}")));
                let beta = match beta {
                    Some(b) => b.clone(),
                    None => random_unit_vector(*d, substream(seed, "beta")),
                };
                let ds = synthesize_logistic(*n, *d, &beta, seed)?.renamed(name);
                split_dataset(&ds, *test_fraction, self.split_seed(base_seed))
            }
            DatasetSpec::Csv {
                name, path, preprocess, ..
            } => {
                if !path.exists() {
                    return Err(missing(path));
                }
                let split = load_csv(path, preprocess, self.split_seed(base_seed))?;
                Ok(SplitDataset {
                    train: split.train.renamed(name),
                    test: split.test.renamed(name),
                })
            }
            DatasetSpec::Prepared { name, dir, .. } => {
                if !dir.exists() {
                    return Err(missing(dir));
                }
                read_prepared(name, dir)
            }
        }
    }

    /// Loads the split and adds the intercept column when configured.
    pub fn load(&self, base_seed: u64) -> Result<SplitDataset<f64>> {
        let split = self.load_raw(base_seed)?;
        if self.intercept() {
            split.add_intercept()
        } else {
            Ok(split)
        }
    }
}

fn missing(path: &std::path::Path) -> Error {
    Error::Io(std::io::Error::new(
        std::io::ErrorKind::NotFound,
        format!("{} does not exist", path.display()),
    ))
}

fn random_unit_vector(d: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub size_lo: usize,
    pub size_hi: usize,
    pub size_count: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            size_lo: 200,
            size_hi: 100_000,
            size_count: 25,
        }
    }
}

/// A full benchmark: datasets × methods × sizes × replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSpec>,
    /// Either bare method names or full sampler blocks.
    #[serde(deserialize_with = "methods_from_entries")]
    pub methods: Vec<SamplerConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub fit: FitConfig,
    /// Fit with the L1 penalty `fit.lambda1` and report support accuracy.
    #[serde(default)]
    pub l1_mode: bool,
    /// Diagnostic: fit on the full training set with unit weights instead of sampling.
    #[serde(default)]
    pub identity_mode: bool,
    /// Write measured task times; off by default so outputs are reproducible byte for byte.
    #[serde(default)]
    pub record_wall_time: bool,
}

fn default_replications() -> usize {
    50
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MethodEntry {
    Name(Method),
    Full(SamplerConfig),
}

fn methods_from_entries<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<SamplerConfig>, D::Error> {
    let entries = Vec::<MethodEntry>::deserialize(de)?;
    Ok(entries
        .into_iter()
        .map(|e| match e {
            MethodEntry::Name(m) => SamplerConfig::new(m),
            MethodEntry::Full(c) => c,
        })
        .collect())
}

impl ExperimentConfig {
    /// Config with the default grid, replications and fit settings.
    pub fn new(datasets: Vec<DatasetSpec>, methods: Vec<SamplerConfig>) -> Self {
        Self {
            datasets,
            methods,
            grid: GridConfig::default(),
            replications: default_replications(),
            base_seed: 0,
            fit: FitConfig::default(),
            l1_mode: false,
            identity_mode: false,
            record_wall_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() || self.methods.is_empty() {
            return Err(Error::Config("at least one dataset and one method are required".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        let mut names = HashSet::new();
        for d in &self.datasets {
            if !names.insert(d.name()) {
                return Err(Error::Config(format!("dataset `{}` is listed twice", d.name())));
            }
        }
        let mut methods = HashSet::new();
        for m in &self.methods {
            m.validate()?;
            if !methods.insert(m.method) {
                return Err(Error::Config(format!("method `{}` is listed twice", m.method)));
            }
        }
        self.fit.validate()?;
        if self.l1_mode != (self.fit.lambda1 > 0.0) {
            return Err(Error::Config("l1_mode requires fit.lambda1 > 0, and lambda1 > 0 requires l1_mode".into()));
        }
        super::size_grid(self.grid.size_lo, self.grid.size_hi, self.grid.size_count, usize::MAX)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults_and_method_forms() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{
                "datasets": [{"source": "synthetic", "name": "s", "n": 100, "d": 3}],
                "methods": ["uniform", {"method": "kmeans", "kmeans_k": 4}]
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.grid, GridConfig::default());
        assert_eq!((cfg.replications, cfg.fit.lambda2), (50, 1e-5));
        assert_eq!(cfg.methods[0], SamplerConfig::new(Method::Uniform));
        assert_eq!(cfg.methods[1].kmeans_k, 4);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_duplicates_and_inconsistent_l1() {
        let ds = DatasetSpec::Synthetic {
            name: "s".into(),
            n: 50,
            d: 2,
            beta: None,
            seed: None,
            test_fraction: 0.1,
            intercept: true,
        };
        let mut cfg = ExperimentConfig::new(vec![ds], vec![SamplerConfig::new(Method::Uniform); 2]);
        assert!(cfg.validate().is_err());
        cfg.methods.pop();
        cfg.validate().unwrap();
        cfg.l1_mode = true;
        assert!(cfg.validate().is_err());
        cfg.fit.lambda1 = 1e-3;
        cfg.validate().unwrap();
    }

    #[test]
    fn synthetic_load_is_deterministic() {
        let ds = DatasetSpec::Synthetic {
            name: "s".into(),
            n: 200,
            d: 3,
            beta: None,
            seed: None,
            test_fraction: 0.05,
            intercept: true,
        };
        let a = ds.load(7).unwrap();
        let b = ds.load(7).unwrap();
        assert_eq!(a.train.x(), b.train.x());
        assert_eq!((a.train.n(), a.test.n(), a.train.d()), (190, 10, 4));
        assert!(a.train.has_intercept());
        assert_eq!(a.train.name(), "s");
        assert_ne!(ds.load(8).unwrap().train.x(), a.train.x());
    }
}
