//! Exact polynomials over `Z` and over `Q_p`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::padic::{Context, Padic};

/// Integer polynomial, constant term first. Trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    coefficients: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        IntPolynomial { coefficients }
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        Self::new(coefficients.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial::default()
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn coefficient(&self, i: usize) -> BigInt {
        self.coefficients.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coefficients.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        Self::new((0..n).map(|i| self.coefficient(i) + other.coefficient(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        Self::new((0..n).map(|i| self.coefficient(i) - other.coefficient(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::from_i64(&[1]), |acc, _| acc.mul(self))
    }

    /// Division with remainder by a monic divisor; exact over `Z`.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("nonzero divisor");
        assert!(divisor.coefficients[d].is_one(), "divisor must be monic");
        let mut rem = self.coefficients.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = rem[k + d].clone();
            if c.is_zero() {
                continue;
            }
            for (i, dc) in divisor.coefficients.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
            quot[k] = c;
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn divisible_by_monic(&self, divisor: &Self) -> bool {
        self.div_rem_monic(divisor).1.is_zero()
    }

    pub fn to_padic(&self, ctx: Context) -> PadicPolynomial {
        PadicPolynomial::new(self.coefficients.iter().map(|c| Padic::from_bigint(ctx, c)).collect())
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial with p-adic coefficients, constant term first.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicPolynomial {
    coefficients: Vec<Padic>,
}

impl PadicPolynomial {
    pub fn new(mut coefficients: Vec<Padic>) -> Self {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        PadicPolynomial { coefficients }
    }

    /// `(x - r_1)...(x - r_k)` expanded.
    pub fn from_roots(ctx: Context, roots: &[Padic]) -> Self {
        let mut coeffs = vec![Padic::one(ctx)];
        for r in roots {
            let mut next = vec![Padic::zero(ctx); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = &next[i + 1] + c;
                next[i] = &next[i] - &(c * r);
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coefficients(&self) -> &[Padic] {
        &self.coefficients
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn scale(&self, s: &Padic) -> Self {
        Self::new(self.coefficients.iter().map(|c| c * s).collect())
    }

    pub fn eval(&self, x: &Padic) -> Padic {
        let zero = Padic::zero(x.context());
        self.coefficients.iter().rev().fold(zero, |acc, c| acc * x + c)
    }

    pub fn is_integral(&self) -> bool {
        self.coefficients.iter().all(Padic::is_integral)
    }

    /// Divides every coefficient by `d`.
    pub fn div_scalar(&self, d: &Padic) -> Result<Self> {
        Ok(Self::new(self.coefficients.iter().map(|c| c.div(d)).collect::<Result<_>>()?))
    }

    pub fn coefficient_or_zero(&self, i: usize, ctx: Context) -> Padic {
        self.coefficients.get(i).cloned().unwrap_or_else(|| Padic::zero(ctx))
    }
}
