//! Content-disjoint benchmark protocol and prediction metrics.

mod benchmark;
mod metrics;
mod split;

pub use benchmark::{
    assemble, cells, run_benchmark, run_trial, validate_benchmark, BenchmarkConfig, BenchmarkInput, CellReport,
    EvalReport, Protocol, TrialRecord,
};
pub use metrics::{metrics, plcc, rmse, score_external, srocc, Metrics};
pub use split::{check_disjoint, content_split, Split};
