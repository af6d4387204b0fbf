use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Scalar;

/// Dense feature matrix with `±1` labels. Immutable once built.
#[derive(Clone, Debug)]
pub struct LabeledDataset<T> {
    name: String,
    x: Matrix<T>,
    y: Vec<i8>,
    has_intercept: bool,
    feature_names: Vec<String>,
}

impl<T: Scalar> LabeledDataset<T> {
    pub fn new(name: impl Into<String>, x: Matrix<T>, y: Vec<i8>, has_intercept: bool) -> Result<Self> {
        let names = (0..x.ncols()).map(|j| format!("x{j}")).collect();
        Self::with_feature_names(name, x, y, has_intercept, names)
    }

    pub fn with_feature_names(
        name: impl Into<String>,
        x: Matrix<T>,
        y: Vec<i8>,
        has_intercept: bool,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        crate::error::check_len(x.nrows(), y.len())?;
        crate::error::check_len(x.ncols(), feature_names.len())?;
        if let Some((i, _)) = x.as_slice().iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let (row, col) = (i / x.ncols().max(1), i % x.ncols().max(1));
            return Err(Error::Data {
                row,
                column: feature_names[col].clone(),
                message: "non-finite feature value".into(),
            });
        }
        if let Some(i) = y.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::Label(format!("row {i} has label {}, expected -1 or +1", y[i])));
        }
        if has_intercept && (x.ncols() == 0 || x.rows().any(|r| r[0] != T::one())) {
            return Err(Error::Usage("intercept flag set but column 0 is not all ones".into()));
        }
        Ok(Self {
            name: name.into(),
            x,
            y,
            has_intercept,
            feature_names,
        })
    }

    /// Same data under another name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    pub fn y(&self) -> &[i8] {
        &self.y
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of columns, intercept included.
    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn positive_fraction(&self) -> f64 {
        if self.y.is_empty() {
            return 0.0;
        }
        self.y.iter().filter(|&&v| v == 1).count() as f64 / self.y.len() as f64
    }

    /// Prepends an all-ones column.
    pub fn add_intercept(&self) -> Result<Self> {
        if self.has_intercept {
            return Err(Error::Usage(format!("dataset `{}` already has an intercept", self.name)));
        }
        let d = self.d() + 1;
        let mut x = Matrix::zeros(self.n(), d);
        for (i, r) in self.x.rows().enumerate() {
            let out = x.row_mut(i);
            out[0] = T::one();
            out[1..].copy_from_slice(r);
        }
        let mut names = Vec::with_capacity(d);
        names.push("intercept".to_string());
        names.extend(self.feature_names.iter().cloned());
        Ok(Self {
            name: self.name.clone(),
            x,
            y: self.y.clone(),
            has_intercept: true,
            feature_names: names,
        })
    }

    /// Gathers the given rows; repeated indices produce repeated rows.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            x: self.x.select_rows(indices),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            has_intercept: self.has_intercept,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Features without the intercept column.
    pub fn x_without_intercept(&self) -> Matrix<T> {
        if self.has_intercept {
            self.x.drop_leading_columns(1)
        } else {
            self.x.clone()
        }
    }
}

/// Disjoint train/test partition of one dataset.
#[derive(Clone, Debug)]
pub struct SplitDataset<T> {
    pub train: LabeledDataset<T>,
    pub test: LabeledDataset<T>,
}

impl<T: Scalar> SplitDataset<T> {
    pub fn add_intercept(&self) -> Result<Self> {
        Ok(Self {
            train: self.train.add_intercept()?,
            test: self.test.add_intercept()?,
        })
    }
}

/// Number of test rows for a fraction: `⌈fraction · n⌉`.
pub(crate) fn test_count(n: usize, fraction: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Config(format!("test fraction {fraction} is outside [0, 1)")));
    }
    let k = (fraction * n as f64).ceil() as usize;
    if k >= n {
        return Err(Error::Config(format!("test fraction {fraction} leaves no training rows out of {n}")));
    }
    Ok(k)
}

/// Seeded uniform shuffle; returns `(train, test)` row indices, each ascending.
pub(crate) fn shuffled_split(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let k = test_count(n, fraction)?;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = perm[..k].to_vec();
    let mut train = perm[k..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Splits an in-memory dataset with a seeded shuffle.
pub fn split_dataset<T: Scalar>(ds: &LabeledDataset<T>, test_fraction: f64, seed: u64) -> Result<SplitDataset<T>> {
    let (train, test) = shuffled_split(ds.n(), test_fraction, seed)?;
    Ok(SplitDataset {
        train: ds.select_rows(&train),
        test: ds.select_rows(&test),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> LabeledDataset<f64> {
        let x = Matrix::<f64>::from_f64_rows(&[[2.0, 1.0], [0.0, 3.0], [1.0, 1.0]]).unwrap();
        LabeledDataset::new("tiny", x, vec![1, -1, 1], false).unwrap()
    }

    #[test]
    fn intercept_prepends_ones() {
        let x = Matrix::<f64>::from_f64_rows(&[[2.0]]).unwrap();
        let ds = LabeledDataset::new("one", x, vec![1], false).unwrap();
        let with = ds.add_intercept().unwrap();
        assert_eq!(with.x().as_slice(), &[1.0, 2.0]);
        assert!(with.has_intercept());

        let with = tiny().add_intercept().unwrap();
        assert_eq!((with.n(), with.d()), (3, 3));
        assert_eq!(with.x().column(0), vec![1.0; 3]);
        assert!(matches!(with.add_intercept(), Err(Error::Usage(_))));
    }

    #[test]
    fn invariants_enforced() {
        let x = Matrix::<f64>::from_f64_rows(&[[f64::NAN]]).unwrap();
        assert!(matches!(LabeledDataset::new("bad", x, vec![1], false), Err(Error::Data { .. })));
        let x = Matrix::<f64>::from_f64_rows(&[[1.0]]).unwrap();
        assert!(matches!(LabeledDataset::new("bad", x.clone(), vec![0], false), Err(Error::Label(_))));
        let x2 = Matrix::<f64>::from_f64_rows(&[[2.0]]).unwrap();
        assert!(LabeledDataset::new("bad", x2, vec![1], true).is_err());
        assert!(LabeledDataset::new("ok", x, vec![-1], true).is_ok());
    }

    #[test]
    fn split_sizes_and_disjointness() {
        let (train, test) = shuffled_split(1000, 0.05, 3).unwrap();
        assert_eq!((train.len(), test.len()), (950, 50));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
        assert_eq!(shuffled_split(1000, 0.05, 3).unwrap(), (train, test));
        assert!(shuffled_split(10, 0.95, 0).is_err());
    }
}
