//! File formats and command-line front end for `blochball-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod templates;

pub use config::RunConfig;
pub use error::CliError;
