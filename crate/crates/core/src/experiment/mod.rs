//! Experiment harness: configuration, pipelines, reports and plots.

pub mod config;
pub mod fixtures;
pub mod plot;
pub mod runner;

pub use config::{
    DatasetSpec, ExperimentConfig, LaplacianKind, Method, NeighborPolicy, Overrides, SigmaPolicy,
};
pub use runner::{
    mean_std, read_results_csv, run_embedding, run_single, run_sweep, write_results_csv,
    write_resolved_config, write_summary_json, ExperimentReport, SingleOutcome, SweepAggregate,
    SweepParam, TrialRecord,
};
