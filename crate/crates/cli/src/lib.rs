//! The `prep`, `run` and `report` commands behind the `coreset` binary.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use coreset_core::bench::{
    aggregate, compare_report, kruskal_report, read_results, run_experiment, write_aggregates, write_comparisons,
    write_kruskal, write_results, ExperimentConfig, Family,
};
use coreset_core::data::{write_prepared, PreparedSummary};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const AGGREGATES_FILE: &str = "aggregates.csv";
pub const VS_UNIFORM_FILE: &str = "comparisons_vs_uniform.csv";
pub const ALL_PAIRS_FILE: &str = "comparisons_all_pairs.csv";
pub const KRUSKAL_FILE: &str = "kruskal.csv";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{0}")]
    Core(#[from] coreset_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration problems, 3 for missing or unreadable inputs, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use coreset_core::Error as E;
        match self {
            CliError::Config { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                E::Config(_) | E::Usage(_) => 2,
                E::Io(_) | E::Csv(_) | E::Data { .. } | E::Label(_) => 3,
                _ => 4,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses and validates a TOML experiment config.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate().map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(cfg)
}

/// Hex SHA-256 of the config's canonical JSON form (defaults filled in).
pub fn config_digest(cfg: &ExperimentConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub tool_version: String,
    pub results: PathBuf,
    #[serde(default)]
    pub aggregates: Option<PathBuf>,
    #[serde(default)]
    pub comparisons: Vec<PathBuf>,
    pub started_unix: f64,
    pub finished_unix: f64,
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    fs::write(path, text).map_err(io_err(path))
}

/// Preprocesses one configured dataset into `out/<name>/`.
pub fn cmd_prep(config_path: &Path, dataset: &str, out: &Path) -> Result<PreparedSummary> {
    let cfg = load_config(config_path)?;
    let spec = cfg
        .datasets
        .iter()
        .find(|d| d.name() == dataset)
        .ok_or_else(|| CliError::Config {
            path: config_path.to_path_buf(),
            message: format!("no dataset named `{dataset}`"),
        })?;
    let split = spec.load_raw(cfg.base_seed)?;
    let summary = write_prepared(&split, &out.join(dataset))?;
    log::info!(
        "{dataset}: n_train={} n_test={} d={} %pos(train)={:.1} %pos(all)={:.1}",
        summary.n_train,
        summary.n_test,
        summary.d,
        summary.pct_positive_train,
        summary.pct_positive_all
    );
    Ok(summary)
}

/// Runs the experiment, writing `results.csv` and `manifest.json` into `out`.
pub fn cmd_run(config_path: &Path, out: &Path, parallelism: usize) -> Result<RunManifest> {
    let cfg = load_config(config_path)?;
    let started = unix_now();
    let records = run_experiment(&cfg, parallelism)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let results = out.join(RESULTS_FILE);
    let file = File::create(&results).map_err(io_err(&results))?;
    write_results(&records, BufWriter::new(file))?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        log::warn!("{failed} of {} records carry an error tag", records.len());
    }
    let manifest = RunManifest {
        config_digest: config_digest(&cfg),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        results,
        aggregates: None,
        comparisons: Vec::new(),
        started_unix: started,
        finished_unix: unix_now(),
    };
    write_json(&manifest, &out.join(MANIFEST_FILE))?;
    Ok(manifest)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportMode {
    /// Medians and quartiles only.
    Aggregate,
    /// Aggregates plus Kruskal–Wallis and Dunn comparison tables.
    Stats,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportOutput {
    pub aggregates: PathBuf,
    /// Comparison tables written, in the order vs-uniform, all-pairs, Kruskal–Wallis.
    pub comparisons: Vec<PathBuf>,
}

/// Aggregates a results file and, in stats mode, writes the comparison tables.
pub fn cmd_report(results_path: &Path, mode: ReportMode, out: &Path) -> Result<ReportOutput> {
    let file = File::open(results_path).map_err(io_err(results_path))?;
    let records = read_results(std::io::BufReader::new(file)).map_err(|e| CliError::Config {
        path: results_path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let aggregates = aggregate(&records);
    let mut output = ReportOutput {
        aggregates: out.join(AGGREGATES_FILE),
        comparisons: Vec::new(),
    };
    let f = File::create(&output.aggregates).map_err(io_err(&output.aggregates))?;
    write_aggregates(&aggregates, BufWriter::new(f))?;

    if mode == ReportMode::Stats {
        let mut methods: Vec<&str> = aggregates.iter().map(|a| a.method.as_str()).collect();
        methods.sort_unstable();
        methods.dedup();
        if methods.len() < 2 {
            log::warn!("results contain a single method; comparisons skipped");
        } else {
            for (family, name) in [(Family::VsUniform, VS_UNIFORM_FILE), (Family::AllPairs, ALL_PAIRS_FILE)] {
                let rows = compare_report(&aggregates, family)?;
                if rows.is_empty() {
                    log::warn!("no pairs for {name}; table skipped");
                    continue;
                }
                let path = out.join(name);
                let f = File::create(&path).map_err(io_err(&path))?;
                write_comparisons(&rows, BufWriter::new(f))?;
                output.comparisons.push(path);
            }
            let path = out.join(KRUSKAL_FILE);
            let f = File::create(&path).map_err(io_err(&path))?;
            write_kruskal(&kruskal_report(&aggregates)?, BufWriter::new(f))?;
            output.comparisons.push(path);
        }
    }

    let manifest_path = out.join(MANIFEST_FILE);
    if let Ok(text) = fs::read_to_string(&manifest_path) {
        if let Ok(mut manifest) = serde_json::from_str::<RunManifest>(&text) {
            manifest.aggregates = Some(output.aggregates.clone());
            manifest.comparisons = output.comparisons.clone();
            write_json(&manifest, &manifest_path)?;
        }
    }
    Ok(output)
}
