//! Command-line front end for flagcode: file formats and command bodies.

pub mod commands;
pub mod error;
pub mod format;

pub use error::{CliError, CliResult};
