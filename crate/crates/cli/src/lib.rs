//! Benchmark harness and command-line front end for the Steiner tree solvers.

pub mod commands;
pub mod record;
pub mod runner;

pub use commands::{run, Cli, CliError};
pub use record::{error_percent, RunRecord};
pub use runner::{run_algorithm, Algorithm, RunOutcome, SolverConfig};
