//! File formats and command-line workflows for multi-scale graph PCA.
//!
//! Stacks travel as binary [`tensor_file`]s; fits and statistics as CSV.

pub mod commands;
pub mod csv_io;
pub mod error;
pub mod fit_files;
pub mod tensor_file;

pub use error::{CliError, Result};
