//! Evaluation harness: synthetic data, splits, metrics, and the repeated
//! experiment runner with its report writers.

mod metrics;
mod report;
mod runner;
mod split;
mod synthetic;

pub use metrics::{average_set_size, empirical_coverage, ood_auc, point_accuracy, Summary};
pub use report::{display_name, summary_table, write_csv, write_json, RunMetadata, CSV_HEADER};
pub use runner::{
    run_experiment, CalibrationMode, DataSource, ExperimentPlan, ExperimentResult, MethodResult,
    RepetitionMetrics, HDC, HDC_TRAIN,
};
pub use split::{split_data, Split, SplitFractions, SplitSpec};
pub use synthetic::{generate_synthetic, SyntheticConfig, OOD_OFFSET};
