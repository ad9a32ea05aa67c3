//! Configuration, initial data, run and sweep orchestration, checkpoints.

pub mod checkpoint;
pub mod config;
pub mod ic;
pub mod runner;
pub mod sweep;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use config::RunConfig;
pub use ic::{make_initial_condition, InitialCondition};
pub use runner::{run, run_from, RunOutcome};
pub use sweep::{sweep, SweepRow, SweepSpec};
