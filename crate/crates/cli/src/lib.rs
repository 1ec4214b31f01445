//! Command-line front end for `kleinian-core`: group configs and presets,
//! cloud export (CSV, PLY), Ford tables, diagnostics and SVG plots.

pub mod commands;
pub mod config;
pub mod error;
pub mod export;
pub mod plot;
pub mod preset;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
