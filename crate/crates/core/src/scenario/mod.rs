//! Experiment configuration and orchestration.

mod config;
mod problem;
mod run;

pub use config::{
    load_config, parse_config, MonteCarlo, OptimizerSettings, ScenarioConfig, ScenarioKind, Sweep,
    SweepVariable,
};
pub use problem::{Decision, Problem};
pub use run::{
    default_resolution, emit_csv, emit_trace_csv, oracle_grid_search, run_scenario, run_trials,
    run_with, trial_scene, trial_seed, GridOutcome, ResultRow, RunReport, Solver, TraceRow,
    TrialResult, ORACLE_MAX_DIMS, RESULT_COLUMNS,
};
