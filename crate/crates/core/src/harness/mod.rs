//! Seeded experiment runner, verification suites and CSV reports.

mod experiment;
mod separation;
mod stats;
mod verify;

pub use experiment::{
    run_experiment, run_single, write_trials_csv, ConceptMode, ExperimentConfig, ExperimentResult,
    ExperimentSummary, LearnerKind, LpnExamples, SolverParams, TrialOutcome, TrialRecord,
    TRIAL_CSV_HEADER,
};
pub use separation::{
    separation_report, work_estimate, write_separation_csv, SeparationConfig, SeparationRow,
    SEPARATION_CSV_HEADER,
};
pub use stats::{binomial_sigma, tv_distance, tv_distance_tables, wilson_interval};
pub use verify::{verify, CheckResult, Suite, VerifyReport};
