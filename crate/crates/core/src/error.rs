//! Error type shared by all modules of the crate.

use alloc::string::String;
use core::fmt;

/// Errors raised by the arithmetic kernels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain an operation is defined on.
    Domain {
        /// Operation that rejected the argument.
        op: &'static str,
        /// Human-readable reason.
        reason: String,
    },
    /// Two operands carry different scalar modes (exact vs. approximate).
    ModeMismatch {
        /// Operation that detected the mismatch.
        op: &'static str,
    },
    /// Division or inversion of a non-invertible element (standard part zero).
    NotInvertible,
    /// `order` of a standard real: the decomposition has no infinitesimal term.
    UndefinedOrder,
    /// A stated precondition does not hold.
    Precondition {
        /// Operation whose precondition failed.
        op: &'static str,
        /// Human-readable reason.
        reason: String,
    },
    /// Evaluation of an expression hit a primitive outside its domain.
    Eval {
        /// The offending primitive (`log`, `sqrt`, `/`).
        primitive: &'static str,
        /// True when the offending argument was exactly zero.
        at_zero: bool,
    },
    /// Smooth extension does not exist: `log`/`sqrt` at standard part zero.
    NotSmoothHere {
        /// The primitive that is not smooth at the base point.
        primitive: &'static str,
    },
    /// Division by an element that is zero modulo the filter oracle.
    DivisionByZero,
    /// Witness construction for an existential projection failed; the
    /// relation instance is not continuous in its domain.
    ContinuityCounterexample {
        /// What went wrong.
        detail: String,
    },
    /// Text input did not parse.
    Parse {
        /// 1-based column of the offending character.
        column: usize,
        /// What was expected or found.
        message: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { op, reason } => write!(f, "domain error in {op}: {reason}"),
            Error::ModeMismatch { op } => {
                write!(f, "mode error in {op}: operands mix exact and approximate scalars")
            }
            Error::NotInvertible => write!(f, "not invertible: standard part is zero"),
            Error::UndefinedOrder => {
                write!(f, "order is undefined for a standard real (no infinitesimal terms)")
            }
            Error::Precondition { op, reason } => {
                write!(f, "precondition of {op} violated: {reason}")
            }
            Error::Eval { primitive, at_zero } => {
                if *at_zero {
                    write!(f, "evaluation error: {primitive} of zero")
                } else {
                    write!(f, "evaluation error: {primitive} outside its domain")
                }
            }
            Error::NotSmoothHere { primitive } => {
                write!(f, "{primitive} is not smooth at a point with standard part zero")
            }
            Error::DivisionByZero => write!(f, "division by zero (modulo the filter oracle)"),
            Error::ContinuityCounterexample { detail } => {
                write!(f, "relation not continuous in the domain: {detail}")
            }
            Error::Parse { column, message } => {
                write!(f, "parse error at column {column}: {message}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
