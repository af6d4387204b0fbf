use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricSet;

/// Exact header of the results CSV.
pub const RESULTS_HEADER: [&str; 11] = [
    "dataset",
    "method",
    "size",
    "rep",
    "rel_nll_error",
    "coef_mse",
    "rel_roc",
    "support_acc",
    "wall_time_ms",
    "fallback_used",
    "error",
];

/// One (dataset, method, size, replication) observation. Failed tasks carry
/// an error tag and no metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub dataset: String,
    pub method: String,
    pub size: usize,
    pub rep: usize,
    pub metrics: Option<MetricSet<f64>>,
    pub wall_time_ms: f64,
    pub fallback_used: bool,
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    dataset: String,
    method: String,
    size: usize,
    rep: usize,
    rel_nll_error: Option<f64>,
    coef_mse: Option<f64>,
    rel_roc: Option<f64>,
    support_acc: Option<f64>,
    wall_time_ms: f64,
    fallback_used: bool,
    error: Option<String>,
}

impl From<&ResultRecord> for Row {
    fn from(r: &ResultRecord) -> Self {
        let m = r.metrics.as_ref();
        Row {
            dataset: r.dataset.clone(),
            method: r.method.clone(),
            size: r.size,
            rep: r.rep,
            rel_nll_error: m.map(|m| m.rel_nll_error),
            coef_mse: m.map(|m| m.coef_mse),
            rel_roc: m.map(|m| m.rel_roc),
            support_acc: m.and_then(|m| m.support_accuracy),
            wall_time_ms: r.wall_time_ms,
            fallback_used: r.fallback_used,
            error: r.error.clone(),
        }
    }
}

impl TryFrom<Row> for ResultRecord {
    type Error = Error;

    fn try_from(r: Row) -> Result<Self> {
        let metrics = match (r.rel_nll_error, r.coef_mse, r.rel_roc) {
            (Some(rel_nll_error), Some(coef_mse), Some(rel_roc)) => Some(MetricSet {
                rel_nll_error,
                coef_mse,
                rel_roc,
                support_accuracy: r.support_acc,
            }),
            (None, None, None) if r.error.is_some() => None,
            _ => {
                return Err(Error::Config(format!(
                    "record {}/{}/{}/{} has incomplete metrics and no error tag",
                    r.dataset, r.method, r.size, r.rep
                )))
            }
        };
        Ok(ResultRecord {
            dataset: r.dataset,
            method: r.method,
            size: r.size,
            rep: r.rep,
            metrics,
            wall_time_ms: r.wall_time_ms,
            fallback_used: r.fallback_used,
            error: r.error,
        })
    }
}

pub fn write_results<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.serialize(Row::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a results CSV, rejecting any header other than [`RESULTS_HEADER`].
pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(Error::Config(format!(
            "results header `{}` does not match `{}`",
            header.join(","),
            RESULTS_HEADER.join(",")
        )));
    }
    r.deserialize::<Row>()
        .map(|row| row.map_err(|e| Error::Config(format!("malformed results row: {e}")))?.try_into())
        .collect()
}
