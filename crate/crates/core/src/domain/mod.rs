//! Shared vocabulary: exact rationals, target interval sets, linear programs
//! and boxes.

mod interval;
mod program;
pub mod rational;

pub use interval::IntervalSet;
pub use program::{BoxRegion, LinearProgram, Row};
pub use rational::{fmt_rational, parse_rational, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("malformed rational `{0}`")]
    MalformedRational(String),
    #[error("interval endpoints must be strictly increasing")]
    OrderViolation,
    #[error("interval set must start at 0 and end at 1")]
    MissingEndpoint,
    #[error("value {0} lies outside [0, 1]")]
    OutOfUnitRange(String),
    #[error("shrink amount too large for this interval set")]
    DeltaTooLarge,
    #[error("shrink amount must be nonnegative")]
    NegativeShrink,
    #[error("variable x{index} out of range (n = {n})")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("box bounds must satisfy 0 <= lo <= hi <= 1")]
    BadBox,
    #[error("line {line}: {msg}")]
    MalformedLp { line: usize, msg: String },
}
