//! File formats and the command-line driver for `symcone`.
pub mod driver;
pub mod format;

pub use driver::{run, Cli, CliError};
