use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::{shuffled_split, test_count, LabeledDataset, SplitDataset};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Scalar;

/// How rows are assigned to the test split.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Seeded uniform shuffle.
    #[default]
    Shuffle,
    /// The last `⌈test_fraction · n⌉` rows of the file.
    Tail,
}

/// A numeric column discretized into equal-width bins and then one-hot encoded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinnedColumn {
    pub column: String,
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

/// Column roles and preprocessing options for one delimited file.
///
/// Column identifiers are header names, or 1-based positions when the file
/// has no header row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessSpec {
    #[serde(default)]
    pub numeric_columns: Vec<String>,
    #[serde(default)]
    pub categorical_columns: Vec<String>,
    #[serde(default)]
    pub binned_columns: Vec<BinnedColumn>,
    #[serde(default = "default_range")]
    pub scale_range: (f64, f64),
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    pub label_column: String,
    /// Raw label mapped to `+1`; exactly one other value may occur.
    #[serde(default)]
    pub positive_label: Option<String>,
    /// Raw label mapped to `-1`; every other value maps to `+1`.
    #[serde(default)]
    pub negative_label: Option<String>,
    #[serde(default)]
    pub split: SplitMode,
    #[serde(default = "yes")]
    pub has_header: bool,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// Omit the indicator of each categorical column's first category.
    #[serde(default)]
    pub drop_first_category: bool,
}

fn default_range() -> (f64, f64) {
    (-1.0, 1.0)
}

fn default_test_fraction() -> f64 {
    0.05
}

fn yes() -> bool {
    true
}

fn default_delimiter() -> char {
    ','
}

impl PreprocessSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.scale_range;
        if !(lo < hi) {
            return Err(Error::Config(format!("scale range ({lo}, {hi}) must satisfy lo < hi")));
        }
        if !(0.0..1.0).contains(&self.test_fraction) {
            return Err(Error::Config(format!("test_fraction {} is outside [0, 1)", self.test_fraction)));
        }
        match (&self.positive_label, &self.negative_label) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(Error::Config(
                    "exactly one of positive_label and negative_label must be set".into(),
                ))
            }
        }
        if !self.delimiter.is_ascii() {
            return Err(Error::Config("delimiter must be a single ASCII character".into()));
        }
        let mut seen = HashSet::new();
        let all = self
            .numeric_columns
            .iter()
            .chain(&self.categorical_columns)
            .chain(self.binned_columns.iter().map(|b| &b.column));
        for c in all {
            if c == &self.label_column {
                return Err(Error::Config(format!("label column `{c}` is also listed as a feature")));
            }
            if !seen.insert(c) {
                return Err(Error::Config(format!("column `{c}` is listed more than once")));
            }
        }
        for b in &self.binned_columns {
            if b.bins == 0 || !(b.lo < b.hi) {
                return Err(Error::Config(format!("invalid binning for column `{}`", b.column)));
            }
        }
        Ok(())
    }
}

/// Min/max statistics of one column, applied as an affine map.
#[derive(Clone, Copy, Debug)]
struct MinMax {
    min: f64,
    max: f64,
}

impl MinMax {
    fn fit(values: impl Iterator<Item = f64>) -> Option<Self> {
        values.fold(None, |acc, v| match acc {
            None => Some(Self { min: v, max: v }),
            Some(s) => Some(Self {
                min: s.min.min(v),
                max: s.max.max(v),
            }),
        })
    }

    fn apply(&self, v: f64, (lo, hi): (f64, f64)) -> f64 {
        if self.max == self.min {
            lo
        } else {
            (v - self.min) / (self.max - self.min) * (hi - lo) + lo
        }
    }
}

/// Affine map of a column onto `range`, sending its minimum to `lo` and its
/// maximum to `hi`. A constant column maps to `lo`.
pub fn min_max_scale<T: Scalar>(column: &[T], range: (T, T)) -> Result<Vec<T>> {
    if column.is_empty() {
        return Err(Error::Data {
            row: 0,
            column: String::new(),
            message: "cannot scale an empty column".into(),
        });
    }
    if let Some(i) = column.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data {
            row: i,
            column: String::new(),
            message: "non-finite value".into(),
        });
    }
    let (lo, hi) = range;
    if !(lo < hi) {
        return Err(Error::Config("scale range must satisfy lo < hi".into()));
    }
    let min = column.iter().copied().fold(T::infinity(), T::min);
    let max = column.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(column
        .iter()
        .map(|&v| if max == min { lo } else { (v - min) / (max - min) * (hi - lo) + lo })
        .collect())
}

enum Encoded {
    Numeric(Vec<f64>),
    Categorical { levels: Vec<String>, codes: Vec<usize> },
}

/// Reads a delimited file, encodes and scales its columns, maps labels to
/// `±1` and splits rows into train and test sets.
///
/// Category levels are collected from the whole file in order of first
/// appearance; scaling statistics come from the training rows only, so test
/// values may fall outside the scale range.
pub fn load_csv<T: Scalar>(path: impl AsRef<Path>, spec: &PreprocessSpec, seed: u64) -> Result<SplitDataset<T>> {
    spec.validate()?;
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter as u8)
        .has_headers(spec.has_header)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec?);
    }
    let header: Vec<String> = if spec.has_header {
        reader.headers()?.iter().map(str::to_string).collect()
    } else {
        let width = records.first().map_or(0, |r| r.len());
        (1..=width).map(|i| i.to_string()).collect()
    };
    let position: HashMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect();
    let locate = |name: &str| {
        position
            .get(name)
            .copied()
            .ok_or_else(|| Error::Config(format!("column `{name}` not found in {}", path.display())))
    };
    // Line numbers for diagnostics are 1-based and count the header.
    let line_of = |row: usize| row + 1 + usize::from(spec.has_header);

    let n = records.len();
    if n == 0 {
        return Err(Error::Data {
            row: 0,
            column: String::new(),
            message: format!("{} has no data rows", path.display()),
        });
    }

    let label_idx = locate(&spec.label_column)?;
    let mut y = Vec::with_capacity(n);
    let mut other_label: Option<String> = None;
    for (row, rec) in records.iter().enumerate() {
        let raw = rec.get(label_idx).unwrap_or_default();
        let label = match (&spec.positive_label, &spec.negative_label) {
            (Some(pos), _) => {
                if raw == pos {
                    1
                } else {
                    match &other_label {
                        None => {
                            other_label = Some(raw.to_string());
                            -1
                        }
                        Some(o) if o == raw => -1,
                        Some(o) => {
                            return Err(Error::Label(format!(
                                "line {}: label `{raw}` is neither `{pos}` nor the other class `{o}`",
                                line_of(row)
                            )))
                        }
                    }
                }
            }
            (None, Some(neg)) => {
                if raw == neg {
                    -1
                } else {
                    1
                }
            }
            (None, None) => unreachable!("validated"),
        };
        y.push(label);
    }

    let parse = |row: usize, col: &str, idx: usize, rec: &csv::StringRecord| -> Result<f64> {
        let cell = rec.get(idx).unwrap_or_default();
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::Data {
                row: line_of(row),
                column: col.to_string(),
                message: format!("cannot parse `{cell}` as a finite number"),
            }),
        }
    };

    let mut features: Vec<(String, Encoded)> = Vec::new();
    for col in &spec.numeric_columns {
        let idx = locate(col)?;
        let values = records
            .iter()
            .enumerate()
            .map(|(row, rec)| parse(row, col, idx, rec))
            .collect::<Result<Vec<f64>>>()?;
        features.push((col.clone(), Encoded::Numeric(values)));
    }
    for col in &spec.categorical_columns {
        let idx = locate(col)?;
        let cells = records.iter().map(|rec| rec.get(idx).unwrap_or_default().to_string());
        features.push((col.clone(), encode_levels(cells)));
    }
    for b in &spec.binned_columns {
        let idx = locate(&b.column)?;
        let width = (b.hi - b.lo) / b.bins as f64;
        let mut cells = Vec::with_capacity(n);
        for (row, rec) in records.iter().enumerate() {
            let v = parse(row, &b.column, idx, rec)?;
            let k = (((v - b.lo) / width).floor().max(0.0) as usize).min(b.bins - 1);
            cells.push(format!("bin{k}"));
        }
        features.push((b.column.clone(), encode_levels(cells.into_iter())));
    }

    let (train_idx, test_idx) = match spec.split {
        SplitMode::Shuffle => shuffled_split(n, spec.test_fraction, seed)?,
        SplitMode::Tail => {
            let k = test_count(n, spec.test_fraction)?;
            ((0..n - k).collect(), (n - k..n).collect())
        }
    };

    let skip = usize::from(spec.drop_first_category);
    let mut names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (col, enc) in &features {
        match enc {
            Encoded::Numeric(values) => {
                let stats = MinMax::fit(train_idx.iter().map(|&i| values[i])).expect("train split is nonempty");
                columns.push(values.iter().map(|&v| stats.apply(v, spec.scale_range)).collect());
                names.push(col.clone());
            }
            Encoded::Categorical { levels, codes } => {
                for (level_idx, level) in levels.iter().enumerate().skip(skip) {
                    columns.push(codes.iter().map(|&c| if c == level_idx { 1.0 } else { 0.0 }).collect());
                    names.push(format!("{col}={level}"));
                }
            }
        }
    }

    let build = |rows: &[usize]| -> Result<LabeledDataset<T>> {
        let d = columns.len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for &i in rows {
            data.extend(columns.iter().map(|c| T::of(c[i])));
        }
        let x = Matrix::from_vec(rows.len(), d, data)?;
        let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        LabeledDataset::with_feature_names(name, x, rows.iter().map(|&i| y[i]).collect(), false, names.clone())
    };
    Ok(SplitDataset {
        train: build(&train_idx)?,
        test: build(&test_idx)?,
    })
}

fn encode_levels(cells: impl Iterator<Item = String>) -> Encoded {
    let mut levels: Vec<String> = Vec::new();
    let mut lookup: HashMap<String, usize> = HashMap::new();
    let codes = cells
        .map(|cell| {
            *lookup.entry(cell.clone()).or_insert_with(|| {
                levels.push(cell);
                levels.len() - 1
            })
        })
        .collect();
    Encoded::Categorical { levels, codes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn spec(numeric: &[&str], categorical: &[&str]) -> PreprocessSpec {
        PreprocessSpec {
            numeric_columns: numeric.iter().map(|s| s.to_string()).collect(),
            categorical_columns: categorical.iter().map(|s| s.to_string()).collect(),
            binned_columns: vec![],
            scale_range: (-1.0, 1.0),
            test_fraction: 0.0,
            label_column: "label".into(),
            positive_label: Some("yes".into()),
            negative_label: None,
            split: SplitMode::Shuffle,
            has_header: true,
            delimiter: ',',
            drop_first_category: false,
        }
    }

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn scale_examples() {
        assert_eq!(min_max_scale(&[2.0, 4.0], (0.0, 1.0)).unwrap(), vec![0.0, 1.0]);
        assert_eq!(min_max_scale(&[3.0, 3.0, 3.0], (-1.0, 1.0)).unwrap(), vec![-1.0; 3]);
        // (x - 1) / 4 * 2 - 1
        assert_eq!(min_max_scale(&[1.0, 2.0, 5.0], (-1.0, 1.0)).unwrap(), vec![-1.0, -0.5, 1.0]);
        assert_eq!(min_max_scale(&[0.0, 5.0, 10.0], (-1.0, 1.0)).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert!(matches!(min_max_scale(&[1.0, f64::INFINITY], (0.0, 1.0)), Err(Error::Data { .. })));
        assert!(min_max_scale::<f64>(&[], (0.0, 1.0)).is_err());
    }

    #[test]
    fn one_hot_and_scaling_from_file() {
        let f = write_csv("num,cat,label\n0,a,yes\n5,b,no\n10,a,yes\n");
        let split: SplitDataset<f64> = load_csv(f.path(), &spec(&["num"], &["cat"]), 0).unwrap();
        let x = split.train.x();
        assert_eq!(x.column(0), vec![-1.0, 0.0, 1.0]);
        assert_eq!(x.row(0)[1..], [1.0, 0.0]);
        assert_eq!(x.row(1)[1..], [0.0, 1.0]);
        assert_eq!(x.row(2)[1..], [1.0, 0.0]);
        assert_eq!(split.train.y(), &[1, -1, 1]);
        assert_eq!(split.train.feature_names(), &["num", "cat=a", "cat=b"]);
        assert_eq!(split.test.n(), 0);
    }

    #[test]
    fn drop_first_category_option() {
        let f = write_csv("cat,label\na,yes\nb,no\nc,yes\n");
        let mut s = spec(&[], &["cat"]);
        s.drop_first_category = true;
        let split: SplitDataset<f64> = load_csv(f.path(), &s, 0).unwrap();
        assert_eq!(split.train.feature_names(), &["cat=b", "cat=c"]);
    }

    #[test]
    fn error_paths() {
        let f = write_csv("num,label\n1,yes\nx,no\n");
        let err = load_csv::<f64>(f.path(), &spec(&["num"], &[]), 0).unwrap_err();
        match err {
            Error::Data { row, column, .. } => assert_eq!((row, column.as_str()), (3, "num")),
            other => panic!("unexpected {other:?}"),
        }
        let err = load_csv::<f64>(f.path(), &spec(&["missing"], &[]), 0).unwrap_err();
        assert!(matches!(err, Error::Config(_)));

        let f = write_csv("num,label\n1,yes\n2,no\n3,maybe\n");
        let err = load_csv::<f64>(f.path(), &spec(&["num"], &[]), 0).unwrap_err();
        assert!(matches!(err, Error::Label(_)));
    }

    #[test]
    fn negative_label_mode_and_binning() {
        let f = write_csv("day,kind\n1,normal\n200,smurf\n365,neptune\n");
        let mut s = spec(&[], &[]);
        s.label_column = "kind".into();
        s.positive_label = None;
        s.negative_label = Some("normal".into());
        s.binned_columns = vec![BinnedColumn {
            column: "day".into(),
            lo: 1.0,
            hi: 366.0,
            bins: 12,
        }];
        let split: SplitDataset<f64> = load_csv(f.path(), &s, 0).unwrap();
        assert_eq!(split.train.y(), &[-1, 1, 1]);
        assert_eq!(split.train.feature_names(), &["day=bin0", "day=bin6", "day=bin11"]);
    }

    #[test]
    fn headerless_columns_by_position_and_tail_split() {
        let f = write_csv("1, a, <=50K\n2, b, >50K\n3, a, <=50K\n4, b, <=50K\n");
        let mut s = spec(&["1"], &["2"]);
        s.has_header = false;
        s.label_column = "3".into();
        s.positive_label = Some(">50K".into());
        s.test_fraction = 0.25;
        s.split = SplitMode::Tail;
        let split: SplitDataset<f64> = load_csv(f.path(), &s, 0).unwrap();
        assert_eq!((split.train.n(), split.test.n()), (3, 1));
        assert_eq!(split.train.y(), &[-1, 1, -1]);
        // Train max is 3, so the test value 4 maps above the range.
        assert!(split.test.x()[(0, 0)] > 1.0);
    }

    #[test]
    fn spec_validation() {
        let mut s = spec(&["a"], &["a"]);
        assert!(s.validate().is_err());
        s = spec(&["label"], &[]);
        assert!(s.validate().is_err());
        s = spec(&["a"], &[]);
        s.scale_range = (1.0, 1.0);
        assert!(s.validate().is_err());
        s = spec(&["a"], &[]);
        s.negative_label = Some("no".into());
        assert!(s.validate().is_err());
    }
}
