//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while fitting, resampling, or building
/// bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A distribution parameter violates its constraint (for example a
    /// non-positive scale).
    InvalidParameter(String),
    /// A probability argument lies outside the domain required by the
    /// operation.
    InvalidProbability { value: f64 },
    /// The sample cannot support the requested operation (too small, has no
    /// spread, or violates a shape requirement such as Type-II ordering).
    DegenerateSample(String),
    /// An iterative optimizer or root finder exhausted its iteration budget.
    NoConvergence { what: &'static str, iterations: u32 },
    /// A root finder was handed an interval that does not bracket a sign
    /// change.
    RootNotBracketed { what: &'static str },
    /// The requested family is not supported by this operation.
    UnsupportedFamily { family: &'static str, operation: &'static str },
    /// Too many replicates failed for the result to be trustworthy.
    ExcessiveFailures { failures: u64, total: u64 },
    /// An index-style argument (bootstrap size, order-statistic rank,
    /// simulation count) is out of range.
    InvalidArgument(String),
    /// Series truncation could not reach the required tail mass.
    TruncationInsufficient { what: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::InvalidProbability { value } => {
                write!(f, "probability {value} outside the valid domain")
            }
            Error::DegenerateSample(what) => write!(f, "degenerate sample: {what}"),
            Error::NoConvergence { what, iterations } => {
                write!(f, "{what} failed to converge after {iterations} iterations")
            }
            Error::RootNotBracketed { what } => {
                write!(f, "{what}: root not bracketed")
            }
            Error::UnsupportedFamily { family, operation } => {
                write!(f, "family {family} is not supported by {operation}")
            }
            Error::ExcessiveFailures { failures, total } => {
                write!(f, "{failures} of {total} replicates failed; result discarded")
            }
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::TruncationInsufficient { what } => {
                write!(f, "{what}: truncation could not reach the required tail bound")
            }
        }
    }
}

impl core::error::Error for Error {}
