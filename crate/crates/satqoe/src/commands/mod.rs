//! One function per CLI subcommand. Each returns a JSON summary for stdout.

mod eval;
mod features;
mod ingest;
mod predict;
mod subjective;

pub use eval::{cmd_eval, load_benchmark_input};
pub use features::cmd_features;
pub use ingest::cmd_ingest;
pub use predict::{cmd_predict, cmd_score_external};
pub use subjective::cmd_subjective;

pub type Summary = serde_json::Value;

pub(crate) const TRACES_DIR: &str = "traces";
pub(crate) const INTERVALS_FILE: &str = "intervals.csv";
pub(crate) const MOS_FILE: &str = "mos.csv";
pub(crate) const REPORT_FILE: &str = "eval_report.json";
pub(crate) const TRIALS_FILE: &str = "eval_trials.csv";
pub(crate) const MODELS_DIR: &str = "models";

pub fn features_file(set: satqoe_core::features::FeatureSet) -> String {
    format!("features_{set}.csv")
}
