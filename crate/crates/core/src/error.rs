//! Error type shared across the toolkit.

use std::fmt;

/// Errors produced by converter construction, conversion, and planning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Channel parameter below the minimum the operation supports.
    QBelowMinimum {
        q: u32,
        min: u32,
        what: &'static str,
    },
    /// A value lies outside the half-open range the operation accepts.
    OutOfRange {
        what: &'static str,
        value: String,
        limit: String,
    },
    /// Two moduli in a list share a common factor.
    NotCoprime { a: String, b: String },
    /// A modulus smaller than 2 was supplied.
    ModulusTooSmall { value: String },
    /// Residue list length does not match the moduli list.
    LengthMismatch { residues: usize, moduli: usize },
    /// Residue vectors or structures built for different q.
    QMismatch { left: u32, right: u32 },
    /// Multi-operand addition over an empty term list.
    EmptyTerms,
    /// Reduction planning failed to reach depth <= 2 within the level budget.
    PlanDepth { levels: usize, achieved: Vec<u32> },
    /// A plan is replayed against a matrix it was not built from.
    PlanMismatch { detail: String },
    /// The tau+ delay line never falls below the tau delay line.
    NoTurningPoint { q: u32 },
    /// Exhaustive verification requested above the dynamic-range cap.
    ExhaustiveAboveCap { dr_bits: u64, cap_bits: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::QBelowMinimum { q, min, what } => {
                write!(f, "{what}: q = {q} is below the minimum q = {min}")
            }
            Error::OutOfRange { what, value, limit } => {
                write!(f, "{what} = {value} is outside [0, {limit})")
            }
            Error::NotCoprime { a, b } => {
                write!(f, "moduli {a} and {b} are not coprime")
            }
            Error::ModulusTooSmall { value } => {
                write!(f, "modulus {value} is smaller than 2")
            }
            Error::LengthMismatch { residues, moduli } => {
                write!(f, "{residues} residues supplied for {moduli} moduli")
            }
            Error::QMismatch { left, right } => {
                write!(f, "mismatched channel parameters q = {left} and q = {right}")
            }
            Error::EmptyTerms => write!(f, "empty term list"),
            Error::PlanDepth { levels, achieved } => {
                write!(
                    f,
                    "reduction did not reach depth <= 2 within {levels} levels; \
                     achieved profile {achieved:?}"
                )
            }
            Error::PlanMismatch { detail } => {
                write!(f, "plan does not match matrix: {detail}")
            }
            Error::NoTurningPoint { q } => {
                write!(f, "tau+ never overtakes tau at q = {q} (slopes do not cross)")
            }
            Error::ExhaustiveAboveCap { dr_bits, cap_bits } => {
                write!(
                    f,
                    "exhaustive verification needs a dynamic range of at most \
                     2^{cap_bits}, got one of {dr_bits} bits"
                )
            }
        }
    }
}

impl std::error::Error for Error {}
