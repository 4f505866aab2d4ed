//! Experiments: presets, regret against the best ranking policy, instance
//! files and CSV output.

mod config;
pub mod io;
mod presets;
pub mod regret;
mod run;

pub use config::{Algorithm, ExperimentConfig, InstanceSource, DOWNSAMPLE_POINTS};
pub use io::{instance_hash, load_instance, save_instance};
pub use presets::*;
pub use regret::{aggregate, downsample_grid, ghost_reference, regret_vs_ghost, AggregateRow, RegretCurve, RegretRow};
pub use run::{
    aggregate_csv, run_csv, run_experiment, run_trace, simulate, write_results, CellResult, ExperimentFiles,
    ExperimentResults, SeedInstance, AGGREGATE_HEADER, RUN_HEADER,
};
