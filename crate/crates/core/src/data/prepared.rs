//! Preprocessed splits on disk: `train.csv` and `test.csv` hold the encoded,
//! scaled features followed by a `label` column of `±1`, and `summary.json`
//! records the sizes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::{LabeledDataset, SplitDataset};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const LABEL_COLUMN: &str = "label";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreparedSummary {
    pub name: String,
    pub n_train: usize,
    pub n_test: usize,
    /// Feature count, excluding any intercept.
    pub d: usize,
    /// Percentage of positive labels in the training split.
    pub pct_positive_train: f64,
    /// Percentage of positive labels over both splits.
    pub pct_positive_all: f64,
}

impl PreparedSummary {
    pub fn of(split: &SplitDataset<f64>) -> Self {
        let (tr, te) = (&split.train, &split.test);
        let pos = |ds: &LabeledDataset<f64>| ds.y().iter().filter(|&&v| v > 0).count();
        let d = tr.d() - usize::from(tr.has_intercept());
        Self {
            name: tr.name().to_string(),
            n_train: tr.n(),
            n_test: te.n(),
            d,
            pct_positive_train: 100.0 * tr.positive_fraction(),
            pct_positive_all: 100.0 * (pos(tr) + pos(te)) as f64 / (tr.n() + te.n()) as f64,
        }
    }
}

fn write_split(ds: &LabeledDataset<f64>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = ds.feature_names().iter().map(String::as_str).collect();
    header.push(LABEL_COLUMN);
    w.write_record(&header)?;
    for (row, &label) in ds.x().rows().zip(ds.y()) {
        let mut fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        fields.push(label.to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes both splits and the summary into `dir`, creating it if needed.
pub fn write_prepared(split: &SplitDataset<f64>, dir: &Path) -> Result<PreparedSummary> {
    if split.train.has_intercept() {
        return Err(Error::Usage("prepared files store features without the intercept column".into()));
    }
    fs::create_dir_all(dir)?;
    write_split(&split.train, &dir.join("train.csv"))?;
    write_split(&split.test, &dir.join("test.csv"))?;
    let summary = PreparedSummary::of(split);
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Numerical(e.to_string()))?;
    fs::write(dir.join("summary.json"), json + "\n")?;
    Ok(summary)
}

fn read_split(name: &str, path: &Path) -> Result<LabeledDataset<f64>> {
    if !path.exists() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{} does not exist", path.display()),
        )));
    }
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.last().map(String::as_str) != Some(LABEL_COLUMN) {
        return Err(Error::Config(format!("{}: last column must be `{LABEL_COLUMN}`", path.display())));
    }
    let d = header.len() - 1;
    let mut values = Vec::new();
    let mut y = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Data {
                row: line,
                column: header[j].clone(),
                message: format!("cannot parse `{cell}`"),
            })?;
            if j < d {
                values.push(v);
            } else if v == 1.0 || v == -1.0 {
                y.push(v as i8);
            } else {
                return Err(Error::Label(format!("{} line {line}: label `{cell}` is not ±1", path.display())));
            }
        }
    }
    let n = y.len();
    let x = Matrix::from_vec(n, d, values)?;
    LabeledDataset::with_feature_names(name, x, y, false, header[..d].to_vec())
}

/// Reads a split previously written by [`write_prepared`].
pub fn read_prepared(name: &str, dir: &Path) -> Result<SplitDataset<f64>> {
    let train = read_split(name, &dir.join("train.csv"))?;
    let test = read_split(name, &dir.join("test.csv"))?;
    if train.d() != test.d() {
        return Err(Error::DimensionMismatch {
            expected: train.d(),
            found: test.d(),
        });
    }
    Ok(SplitDataset { train, test })
}
