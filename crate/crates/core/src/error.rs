use alloc::string::String;
use core::fmt;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors surfaced by exact computations.
///
/// `Invariant` is special: it signals that an identity which must hold by
/// construction (integrality of a recovered count, agreement of the three
/// TV forms) failed, i.e. a bug, not bad input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input outside the operation's domain (negative probability, zero
    /// denominator, malformed rational literal, ...).
    Domain(String),
    /// Two distributions over differently sized domains were combined.
    DimensionMismatch { left: usize, right: usize },
    /// An enumeration over `2^n` outcomes was refused because `n` exceeds
    /// the configured cap.
    CapExceeded { n: usize, cap: usize },
    /// An internal identity that must hold by construction was violated.
    Invariant(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right} coordinates")
            }
            Error::CapExceeded { n, cap } => {
                write!(f, "n = {n} exceeds the enumeration cap of {cap} (2^n outcomes)")
            }
            Error::Invariant(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
