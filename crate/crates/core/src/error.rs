use alloc::string::String;
use core::fmt;

use crate::padic::Valuation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Operands were built over different primes.
    PrimeMismatch { left: u32, right: u32 },
    DivisionByZero,
    /// Not enough significant digits remain to produce a meaningful value.
    PrecisionExhausted { needed: i64, available: i64 },
    /// A Mahler coefficient left `Z_p`.
    NonIntegral { index: usize, valuation: i64 },
    /// The representation carries no certificate deciding the question.
    Undecidable(&'static str),
    /// The operator cannot be turned into a diagonal-plus-finite matrix.
    NotMaterializable(&'static str),
    /// `|A(A-1)...(A-(n-1))|` exceeded `p^-v_p(n!)`.
    CertificationFailed { n: usize, achieved: Valuation, required: i64 },
    NoConvergence { iterations: usize },
    PreconditionFailed(String),
    DependentBasis { index: usize },
    SearchExhausted { budget: usize },
    InvalidInput(String),
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PrimeMismatch { left, right } => {
                write!(f, "prime mismatch: {left} vs {right}")
            }
            Error::DivisionByZero => f.write_str("division by zero"),
            Error::PrecisionExhausted { needed, available } => write!(
                f,
                "precision exhausted: {needed} digits needed, {available} available"
            ),
            Error::NonIntegral { index, valuation } => write!(
                f,
                "coefficient {index} has valuation {valuation}, outside Z_p"
            ),
            Error::Undecidable(what) => write!(f, "undecidable: {what}"),
            Error::NotMaterializable(what) => write!(f, "not materializable: {what}"),
            Error::CertificationFailed { n, achieved, required } => write!(
                f,
                "normal contraction certification failed at n = {n}: valuation {achieved}, required >= {required}"
            ),
            Error::NoConvergence { iterations } => {
                write!(f, "no convergence after {iterations} iterations")
            }
            Error::PreconditionFailed(msg) => write!(f, "precondition failed: {msg}"),
            Error::DependentBasis { index } => {
                write!(f, "basis vector {index} is linearly dependent on its predecessors")
            }
            Error::SearchExhausted { budget } => {
                write!(f, "power-pair search exhausted its budget of {budget} powers")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
