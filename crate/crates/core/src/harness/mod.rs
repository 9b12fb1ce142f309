//! Multi-seed experiment orchestration, persistence and comparison.

pub mod compare;
pub mod config;
pub mod persist;
pub mod run;

pub use compare::{compare, CompareMethod, CompareReport};
pub use config::{derive_seed, ExperimentConfig, SeedSpec, SiSource};
pub use persist::{load_arm, load_run, save_experiment, save_run};
pub use run::{emit_si_grid, knack_analysis, run_experiment, run_single, KnackAnalysis, RunRecord};
