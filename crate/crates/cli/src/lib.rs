//! Library behind the `stdp` command-line tool: configuration, dataset
//! files, CSV output and the command implementations.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or input files. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Model or numerical failure. Exit code 2.
    #[error(transparent)]
    Model(#[from] stdp_core::Error),
    /// Filesystem failure while writing results. Exit code 2.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Model(_) | Self::Io(_) => 2,
        }
    }
}

/// Writes one line to stdout; a closed pipe is not an error.
pub fn say(line: std::fmt::Arguments) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{line}");
}
