//! Labeled datasets, preprocessing and synthetic data.

mod dataset;
mod prepared;
mod preprocess;
mod synth;

pub use dataset::{split_dataset, LabeledDataset, SplitDataset};
pub use prepared::{read_prepared, write_prepared, PreparedSummary, LABEL_COLUMN};
pub use preprocess::{load_csv, min_max_scale, BinnedColumn, PreprocessSpec, SplitMode};
pub use synth::synthesize_logistic;
