//! Experiment orchestration: configuration, single- and multi-stage runs,
//! theory-overlay cost predictions, and CSV emission.

mod config;
mod experiment;
mod multistage;
mod predicted;

pub use config::{AlgoSel, Algorithm, ConfigError, ExperimentConfig, ModeSel, RoundsArg};
pub use experiment::{run_experiment, run_trial, write_csv_header, DriverError, ResultRow, RunSummary, TrialOutcome};
pub use multistage::{multistage_sort, MultistageAlgo, StageReport};
pub use predicted::{predicted_costs, PredictedCosts};
