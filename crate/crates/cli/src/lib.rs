//! Batch driver: configuration parsing, runs, sweeps and figure recipes.

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod runner;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
