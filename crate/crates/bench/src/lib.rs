//! Experiment harness for `cgsmooth`: single denoising runs with report
//! files, the four paired iterated-versus-CG experiments, restart schedule
//! sweeps and matplotlib script emission. The `cgsmooth` binary wraps these
//! behind subcommands.

pub mod config;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod suite;

pub use config::{ExperimentConfig, GuidanceMode};
pub use error::{BenchError, Result};
pub use experiment::{generate, run_experiment, DenoiseReport, Inputs, SignalFiles};
pub use plot::{emit_plot_script, emit_plot_script_for, entries_in_dir, PlotEntry};
pub use suite::{
    default_ranges, run_suite, run_sweep, sweep_csv, sweep_schedules, PairResult, PairSpec,
    SuiteSummary, SweepCell, PAIR_TOLERANCE_DB, SUITE_PAIRS,
};
