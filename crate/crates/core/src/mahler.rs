//! Continuous functions `Z_p -> Z_p` through their Mahler coefficients
//! `f(x) = sum_n T_n binom(x, n)`.

use alloc::vec::Vec;

use crate::combinatorics::{binomial_padic, vandermonde_coefficients};
use crate::error::{Error, Result};
use crate::padic::{Context, Padic, Valuation, ValuationBound};
use crate::poly::IntPolynomial;

#[derive(Clone, Debug, PartialEq)]
pub struct MahlerFunction {
    ctx: Context,
    coefficients: Vec<Padic>,
    tail_bound: ValuationBound,
}

fn check_integral(coefficients: &[Padic]) -> Result<()> {
    for (index, c) in coefficients.iter().enumerate() {
        if !c.is_integral() {
            let valuation = c.valuation().finite().unwrap_or(0);
            return Err(Error::NonIntegral { index, valuation });
        }
    }
    Ok(())
}

impl MahlerFunction {
    /// `tail_bound` must dominate every coefficient past the listed ones.
    pub fn new(ctx: Context, coefficients: Vec<Padic>, tail_bound: ValuationBound) -> Result<Self> {
        check_integral(&coefficients)?;
        if !tail_bound.is_contractive() {
            return Err(Error::InvalidInput("tail bound must be at most 1".into()));
        }
        Ok(MahlerFunction { ctx, coefficients, tail_bound })
    }

    pub fn zero(ctx: Context) -> Self {
        MahlerFunction { ctx, coefficients: Vec::new(), tail_bound: ValuationBound::ZERO }
    }

    /// `binom(x, 1)`.
    pub fn identity(ctx: Context) -> Self {
        MahlerFunction { ctx, coefficients: alloc::vec![ctx.zero(), ctx.one()], tail_bound: ValuationBound::ZERO }
    }

    /// Coefficients from samples `f(0), ..., f(M)` by forward differences
    /// at zero. The tail is taken to vanish; attach a different bound with
    /// [`MahlerFunction::with_tail_bound`].
    pub fn expand(ctx: Context, samples: &[Padic]) -> Result<Self> {
        for (index, s) in samples.iter().enumerate() {
            if !s.is_integral() {
                let valuation = s.valuation().finite().unwrap_or(0);
                return Err(Error::NonIntegral { index, valuation });
            }
        }
        let mut row: Vec<Padic> = samples.to_vec();
        let mut coefficients = Vec::with_capacity(samples.len());
        while let Some(first) = row.first() {
            coefficients.push(first.clone());
            row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        check_integral(&coefficients)?;
        Ok(MahlerFunction { ctx, coefficients, tail_bound: ValuationBound::ZERO })
    }

    /// Samples an integer polynomial at `0..=deg` and expands.
    pub fn from_polynomial(ctx: Context, f: &IntPolynomial) -> Result<Self> {
        let deg = f.degree().unwrap_or(0);
        let samples: Vec<Padic> = (0..=deg)
            .map(|k| Padic::from_bigint(ctx, &f.eval(&num_bigint::BigInt::from(k))))
            .collect();
        let mut out = MahlerFunction::expand(ctx, &samples)?;
        out.trim();
        Ok(out)
    }

    pub fn with_tail_bound(mut self, tail_bound: ValuationBound) -> Result<Self> {
        if !tail_bound.is_contractive() {
            return Err(Error::InvalidInput("tail bound must be at most 1".into()));
        }
        self.tail_bound = tail_bound;
        Ok(self)
    }

    fn trim(&mut self) {
        while self.coefficients.last().is_some_and(Padic::is_zero) {
            self.coefficients.pop();
        }
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn coefficients(&self) -> &[Padic] {
        &self.coefficients
    }

    pub fn coefficient(&self, n: usize) -> Padic {
        self.coefficients.get(n).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn tail_bound(&self) -> ValuationBound {
        self.tail_bound
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `sum_{n <= M} T_n binom(x, n)`; the true value differs by at most
    /// [`MahlerFunction::tail_bound`].
    pub fn eval(&self, x: &Padic) -> Result<Padic> {
        if !x.is_integral() {
            return Err(Error::PreconditionFailed("Mahler series are evaluated on Z_p".into()));
        }
        let mut acc = self.ctx.zero();
        for (n, t) in self.coefficients.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            acc = acc + t * &binomial_padic(x, n as u64)?;
        }
        Ok(acc)
    }

    /// `max_n |T_n|`, including the tail bound.
    pub fn sup_norm(&self) -> ValuationBound {
        self.coefficients.iter().map(Padic::norm).fold(self.tail_bound, ValuationBound::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        MahlerFunction {
            ctx: self.ctx,
            coefficients: (0..n).map(|i| self.coefficient(i) + other.coefficient(i)).collect(),
            tail_bound: self.tail_bound.max(other.tail_bound),
        }
    }

    /// `a * f` for `a` in `Z_p`.
    pub fn scale(&self, a: &Padic) -> Result<Self> {
        if !a.is_integral() {
            return Err(Error::PreconditionFailed("Mahler scalars must lie in Z_p".into()));
        }
        Ok(MahlerFunction {
            ctx: self.ctx,
            coefficients: self.coefficients.iter().map(|c| c * a).collect(),
            tail_bound: self.tail_bound.times(a.norm()),
        })
    }

    /// Pointwise product, multiplied out in the binomial basis.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = alloc::vec![self.ctx.zero(); (self.len() + other.len()).saturating_sub(1)];
        for (m, a) in self.coefficients.iter().enumerate() {
            for (n, b) in other.coefficients.iter().enumerate() {
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (l, c) in vandermonde_coefficients(m as u64, n as u64) {
                    let l = l as usize;
                    out[l] = &out[l] + &(&ab * &Padic::from_biguint(self.ctx, &c));
                }
            }
        }
        let tail_bound = self.tail_bound.times(other.sup_norm()).max(other.tail_bound.times(self.sup_norm()));
        let mut f = MahlerFunction { ctx: self.ctx, coefficients: out, tail_bound };
        f.trim();
        f
    }

    /// Smallest valuation among listed coefficients, if any is nonzero.
    pub fn min_valuation(&self) -> Valuation {
        self.coefficients.iter().map(Padic::valuation).min().unwrap_or(Valuation::Infinite)
    }
}
