//! IO companion to `tvlab-core`: JSON wire formats, seeded instance
//! generation, the invariant verification suites, and the report shapes
//! shared by the `tvlab` binary and its test suites.
//!
//! Everything that prints to stdout is deterministic for a fixed command
//! line and seed; wall-clock timing only ever goes to stderr.

pub mod gen;
pub mod json;
pub mod report;
pub mod suites;

use std::fmt;

/// Process exit codes, fixed as part of the CLI contract.
pub mod exit_code {
    /// Malformed input: unreadable file, bad JSON, out-of-range values.
    pub const INPUT: u8 = 2;
    /// Enumeration width over the configured cap.
    pub const CAP: u8 = 3;
    /// An internal identity failed; the computation cannot be trusted.
    pub const INVARIANT: u8 = 4;
    /// A computed count disagreed with the brute-force oracle.
    pub const ORACLE_MISMATCH: u8 = 5;
}

/// Error carrying its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: exit_code::INPUT, message: message.into() }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        CliError { code: exit_code::INVARIANT, message: message.into() }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        CliError { code: exit_code::ORACLE_MISMATCH, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<tvlab_core::Error> for CliError {
    fn from(err: tvlab_core::Error) -> Self {
        let code = match &err {
            tvlab_core::Error::Domain(_) | tvlab_core::Error::DimensionMismatch { .. } => {
                exit_code::INPUT
            }
            tvlab_core::Error::CapExceeded { .. } => exit_code::CAP,
            tvlab_core::Error::Invariant(_) => exit_code::INVARIANT,
        };
        CliError { code, message: err.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::input(format!("malformed JSON: {err}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::input(format!("cannot read input: {err}"))
    }
}
