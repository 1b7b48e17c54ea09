//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while building or checking structures.
///
/// Variants carry enough data to reconstruct the failure: offending
/// operators are stored in their text form so the error stays printable
/// without dragging type parameters around.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Generating set is not a valid stabiliser group: generators do not
    /// commute, are dependent, or the group contains -I.
    InvalidGroup(String),
    /// A signed observable must have a real sign (phase exponent 0 or 2).
    NotHermitian(String),
    /// Operators of different qubit counts were combined.
    LengthMismatch { expected: usize, got: usize },
    /// Text or JSON form of a Pauli could not be parsed.
    Parse(String),
    /// Two groups agree on an unsigned element but disagree on its sign,
    /// so no common eigenspace exists. Carries the witness element.
    SignConflict(String),
    /// A forced outcome stream was exhausted before the run finished.
    OutcomesExhausted,
    /// Run state does not match the expected source group of a transition.
    GroupMismatch(String),
    /// A period action was requested for a sequence whose first and last
    /// groups differ (up to signs).
    NotPeriodic(String),
    /// Dense-oracle guard: the requested operation would materialise a
    /// matrix or state beyond the supported size.
    TooLarge { n: usize, max: usize },
    /// A dense state failed a codespace precondition.
    OutsideCodespace { residual: f64 },
    /// Canonical decomposition did not reproduce the input within
    /// tolerance; carries the extracted phase table (mask, angle).
    Reconstruction {
        residual: f64,
        phases: alloc::vec::Vec<(u64, f64)>,
    },
    /// An operator was expected to lie in a specific quotient group.
    NotInQuotient(String),
    /// An operator was expected to commute with a whole group (to be a
    /// logical representative) but does not.
    NotLogical(String),
    /// Observable regions overlap, so a connected correlation over
    /// disjoint supports is not defined.
    RegionOverlap,
    /// Invalid or unsupported constructor parameter.
    BadParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGroup(why) => write!(f, "invalid stabiliser group: {why}"),
            Error::NotHermitian(op) => write!(f, "operator is not Hermitian: {op}"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "qubit count mismatch: expected {expected}, got {got}")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::SignConflict(el) => {
                write!(f, "sign conflict: both signs of {el} would be stabilised")
            }
            Error::OutcomesExhausted => write!(f, "forced outcome stream exhausted"),
            Error::GroupMismatch(why) => write!(f, "group mismatch: {why}"),
            Error::NotPeriodic(why) => write!(f, "sequence is not periodic: {why}"),
            Error::TooLarge { n, max } => {
                write!(f, "dense oracle refuses n = {n} qubits (limit {max})")
            }
            Error::OutsideCodespace { residual } => {
                write!(f, "state is not in the codespace (residual {residual:e})")
            }
            Error::Reconstruction { residual, .. } => {
                write!(f, "decomposition failed to reconstruct input (residual {residual:e})")
            }
            Error::NotInQuotient(op) => {
                write!(f, "operator {op} is not in the required quotient group")
            }
            Error::NotLogical(op) => {
                write!(f, "operator {op} does not commute with the stabiliser group")
            }
            Error::RegionOverlap => write!(f, "observable supports overlap"),
            Error::BadParameter(msg) => write!(f, "bad parameter: {msg}"),
        }
    }
}
