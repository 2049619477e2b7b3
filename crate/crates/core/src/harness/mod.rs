//! Experiment protocol: targets, configs, repeated paired-seed runs and reports.

mod config;
mod experiment;
mod report;
mod targets;

pub use config::{EvaluatorCommand, ExperimentConfig, OptimizerKind, Paths, MIN_TSB, SCHEMA_VERSION};
pub use experiment::{
    aid_bounds, lf_evaluator, load_refined, repeat_seed, run_experiment, run_repeats, sfr_bounds, sfr_hf,
    ProblemContext, RunRecord, AID_GAMMA, SFR_HF_DIM, SFR_LF_DIM,
};
pub use report::{
    emit_report, plot_table, read_runs_csv, read_summary, write_plot_csv, Aggregate, PlotRow, ReportFiles,
    SummaryReport,
};
pub use targets::{aid_design, make_target, sfr_boundary, TargetKind, TargetRecord};
