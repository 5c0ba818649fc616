//! Config-driven sweeps over model families.
//!
//! A config expands into sweep points; each point is trained for a number of
//! realizations and every evaluation is written to `results.csv`. The run
//! directory also holds `manifest.json`, `summary.csv`,
//! `final_distributions.csv` and `timings.csv` (the only file whose content
//! depends on the machine).

pub mod config;
pub mod results;
mod runner;
pub mod sweep;

pub use config::{ExperimentConfig, ExperimentKind, ModelSettings, SweepAxes};
pub use results::{read_results, read_summary, summarize, ResultRow, SummaryRow, SCHEMA_VERSION};
pub use runner::{
    decision_stamps, point_target, read_final_distributions, run_experiment, run_job, RunOptions, RunReport,
};
pub use sweep::{expand, PointModel, SweepPoint};
