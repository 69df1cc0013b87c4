//! Experiment harness: built-in scenarios, runs, statistics and output files.

pub mod experiment;
pub mod export;
pub mod scenario;
pub mod stats;
pub mod svg;

pub use experiment::{run_experiment, run_suite, RunRecord};
pub use export::{export_outputs, load_runs};
pub use scenario::{builtin_scenarios, ScenarioSpec};
pub use stats::{pearson, summarize, SummaryRow};
