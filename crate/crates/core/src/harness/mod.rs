//! Seeded parameter sweeps over the four schemes and their CSV output.

mod experiment;
mod output;

pub use experiment::{
    derive_seed, run_experiment, run_experiment_report, trial_seed, ExperimentReport, ExperimentSpec, Scheme,
    SweepKind, SweepRow, TrialScore,
};
pub use output::{read_csv, write_csv, write_metadata, CSV_HEADER};
