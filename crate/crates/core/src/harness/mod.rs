//! Configuration-driven experiment runner: trial generation, deterministic
//! seeding and ordering, summary statistics and result files.

mod config;
mod emit;
mod qubit;
mod records;
mod selftest;
mod studies;

pub use config::{ExperimentConfig, ExperimentKind, Metric, ShotAccounting, DEFAULT_SHOTS, SCHEMA_VERSION};
pub use emit::{
    emit_results, plot_series, read_trials_csv, write_summary_csv, write_trials_csv, OutputFormat, PlotPoint,
    PlotSeries, PLOT_COLUMNS, SUMMARY_COLUMNS, TRIAL_COLUMNS,
};
pub use qubit::{run_qubit_comparison, DeviceQubitGate};
pub use records::{mean, median, quantile_sorted, sort_records, std_dev, summarize, Method, SummaryRow, TrialRecord};
pub use selftest::{selftest, SelftestResult};
pub use studies::{run_close_identity_study, run_fisher_distance_study, run_gm_accuracy_study};

use crate::error::Result;
use crate::par::Execution;

/// Trial records of `cfg` in canonical order, so that the emitted files do
/// not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<TrialRecord>> {
    let mut records = match cfg.experiment {
        ExperimentKind::QubitComparison => run_qubit_comparison(cfg, exec)?,
        ExperimentKind::CloseIdentityStudy => run_close_identity_study(cfg, exec)?,
        ExperimentKind::GmAccuracyStudy => run_gm_accuracy_study(cfg, exec)?,
        ExperimentKind::FisherDistanceStudy => run_fisher_distance_study(cfg, exec)?,
    };
    sort_records(&mut records, &cfg.scenarios);
    Ok(records)
}
