//! Experiment runner for the `paracomm` library: configuration, subcommand
//! dispatch, CSV and SVG output.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod plot;

pub use commands::{run, Command, Outcome, CSV_SCHEMAS};
pub use config::RunConfig;
