//! Exact p-adic scalars, operators on `Q_p(N)` and their functional calculus.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod admissibility;
pub mod calculus;
pub mod combinatorics;
pub mod dense;
pub mod error;
pub mod idempotents;
pub mod mahler;
pub mod matrix;
pub mod operator;
pub mod padic;
pub mod poly;
pub mod scale;
pub mod vector;

pub use error::{Error, Result};
pub use mahler::MahlerFunction;
pub use matrix::Matrix;
pub use operator::{IndexRule, Operator, PairingScheme, Repr, SumRingMap};
pub use padic::{padic_arith, ArithOp, Context, Padic, Valuation, ValuationBound};
pub use poly::{IntPolynomial, PadicPolynomial};
pub use vector::{pairing, PadicVector, PairingValue};
