//! p-adic scalars with capped relative precision.
//!
//! A nonzero [`Padic`] is `p^v * u` where `u` is a unit known modulo
//! `p^precision`. Zero is exact. Norms never leave the integers: every
//! comparison happens on valuations.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Products whose valuation would exceed this are flushed to exact zero.
/// No working precision comes anywhere near it.
pub const VALUATION_LIMIT: i64 = 1 << 48;

/// Prime and relative precision shared by every value of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Context {
    prime: u32,
    precision: u32,
}

impl Context {
    pub fn new(prime: u32, precision: u32) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::InvalidInput(format!("{prime} is not prime")));
        }
        if precision == 0 {
            return Err(Error::InvalidInput("precision must be positive".to_string()));
        }
        Ok(Context { prime, precision })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn zero(&self) -> Padic {
        Padic::zero(*self)
    }

    pub fn one(&self) -> Padic {
        Padic::from_i64(*self, 1)
    }

    pub fn int(&self, n: i64) -> Padic {
        Padic::from_i64(*self, n)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation; `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Valuation of a product.
    pub fn add(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }

    pub fn scale(self, k: i64) -> Valuation {
        match self {
            Valuation::Finite(a) => Valuation::Finite(a * k),
            Valuation::Infinite if k == 0 => Valuation::Finite(0),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    /// True when `self >= v`.
    pub fn at_least(self, v: i64) -> bool {
        self >= Valuation::Finite(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// The exact norm `p^-exponent`. Ordered by norm, so a larger valuation
/// compares as smaller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ValuationBound {
    pub exponent: Valuation,
}

impl ValuationBound {
    pub const ZERO: ValuationBound = ValuationBound { exponent: Valuation::Infinite };
    pub const ONE: ValuationBound = ValuationBound { exponent: Valuation::Finite(0) };

    pub fn from_exponent(v: i64) -> Self {
        ValuationBound { exponent: Valuation::Finite(v) }
    }

    pub fn new(exponent: Valuation) -> Self {
        ValuationBound { exponent }
    }

    /// Norm of a product bound: `p^-(a+b)`.
    pub fn times(self, other: ValuationBound) -> ValuationBound {
        ValuationBound { exponent: self.exponent.add(other.exponent) }
    }

    pub fn pow(self, k: i64) -> ValuationBound {
        ValuationBound { exponent: self.exponent.scale(k) }
    }

    pub fn is_zero(self) -> bool {
        self.exponent.is_infinite()
    }

    /// `norm <= 1`.
    pub fn is_contractive(self) -> bool {
        self.exponent.at_least(0)
    }

    /// `norm <= p^-v`.
    pub fn within(self, v: i64) -> bool {
        self.exponent.at_least(v)
    }
}

impl PartialOrd for ValuationBound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ValuationBound {
    fn cmp(&self, other: &Self) -> Ordering {
        other.exponent.cmp(&self.exponent)
    }
}

impl fmt::Display for ValuationBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent {
            Valuation::Finite(v) => write!(f, "p^{}", -v),
            Valuation::Infinite => f.write_str("0"),
        }
    }
}

pub(crate) fn pow_big(p: u32, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// An element of `Q_p` at finite relative precision.
#[derive(Clone, Debug)]
pub struct Padic {
    prime: u32,
    precision: u32,
    valuation: i64,
    unit: BigUint,
}

impl Padic {
    pub fn zero(ctx: Context) -> Padic {
        Padic { prime: ctx.prime, precision: ctx.precision, valuation: 0, unit: BigUint::zero() }
    }

    pub fn one(ctx: Context) -> Padic {
        Padic::from_i64(ctx, 1)
    }

    pub fn from_i64(ctx: Context, n: i64) -> Padic {
        Padic::from_bigint(ctx, &BigInt::from(n))
    }

    pub fn from_bigint(ctx: Context, n: &BigInt) -> Padic {
        let (sign, mag) = (n.sign(), n.magnitude().clone());
        let value = Padic::from_biguint_with(ctx.prime, ctx.precision, mag);
        if sign == Sign::Minus { -value } else { value }
    }

    pub fn from_biguint(ctx: Context, n: &BigUint) -> Padic {
        Padic::from_biguint_with(ctx.prime, ctx.precision, n.clone())
    }

    fn from_biguint_with(prime: u32, precision: u32, mut n: BigUint) -> Padic {
        if n.is_zero() {
            return Padic { prime, precision, valuation: 0, unit: n };
        }
        let p = BigUint::from(prime);
        let mut v = 0i64;
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            n = q;
            v += 1;
        }
        let unit = n % pow_big(prime, precision);
        Padic { prime, precision, valuation: v, unit }
    }

    /// `num / den` as a p-adic number.
    pub fn from_ratio(ctx: Context, num: i64, den: i64) -> Result<Padic> {
        Padic::from_i64(ctx, num).div(&Padic::from_i64(ctx, den))
    }

    /// `p^k`.
    pub fn p_power(ctx: Context, k: i64) -> Padic {
        Padic { prime: ctx.prime, precision: ctx.precision, valuation: k, unit: BigUint::one() }
    }

    /// Builds `p^valuation * unit` directly. The unit is reduced modulo
    /// `p^precision` and must not be divisible by `p`.
    pub fn from_parts(prime: u32, valuation: i64, unit: BigUint, precision: u32) -> Result<Padic> {
        if precision == 0 {
            return Err(Error::InvalidInput("precision must be positive".to_string()));
        }
        let unit = unit % pow_big(prime, precision);
        if (&unit % BigUint::from(prime)).is_zero() {
            return Err(Error::InvalidInput("unit part divisible by p".to_string()));
        }
        Ok(Padic { prime, precision, valuation, unit })
    }

    pub fn context(&self) -> Context {
        Context { prime: self.prime, precision: self.precision }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// Relative precision: the number of known unit digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero() { Valuation::Infinite } else { Valuation::Finite(self.valuation) }
    }

    pub fn norm(&self) -> ValuationBound {
        ValuationBound::new(self.valuation())
    }

    /// `valuation + precision`; `None` for the exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        if self.is_zero() { None } else { Some(self.valuation + self.precision as i64) }
    }

    pub fn is_integral(&self) -> bool {
        self.is_zero() || self.valuation >= 0
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.valuation == 0
    }

    /// Residue class modulo `p` of an integral value.
    pub fn residue(&self) -> Option<u32> {
        if self.is_zero() || self.valuation > 0 {
            Some(0)
        } else if self.valuation < 0 {
            None
        } else {
            (&self.unit % BigUint::from(self.prime)).to_u32()
        }
    }

    /// Same value with at most `prec` relative digits.
    pub fn truncate_precision(&self, prec: u32) -> Padic {
        if prec >= self.precision || self.is_zero() {
            return self.clone();
        }
        let prec = prec.max(1);
        Padic {
            prime: self.prime,
            precision: prec,
            valuation: self.valuation,
            unit: &self.unit % pow_big(self.prime, prec),
        }
    }

    /// Lowers the precision so the value is known at most modulo `p^cap`.
    /// Values with nothing left below the cap become zero.
    pub fn cap_absolute(&self, cap: i64) -> Padic {
        if self.is_zero() {
            return self.clone();
        }
        let room = cap - self.valuation;
        if room <= 0 {
            return Padic::zero(self.context());
        }
        self.truncate_precision(room.min(u32::MAX as i64) as u32)
    }

    /// Structural identity: same prime, valuation, unit digits and precision.
    pub fn same_repr(&self, other: &Padic) -> bool {
        self.prime == other.prime
            && self.is_zero() == other.is_zero()
            && (self.is_zero()
                || (self.valuation == other.valuation
                    && self.precision == other.precision
                    && self.unit == other.unit))
    }

    fn check_prime(&self, other: &Padic) {
        assert_eq!(self.prime, other.prime, "p-adic operands over different primes");
    }

    /// Strips factors of `p` from `value` known modulo `p^width`.
    fn normalize(prime: u32, width: u32, valuation: i64, mut value: BigUint) -> Padic {
        if value.is_zero() {
            return Padic { prime, precision: width.max(1), valuation: 0, unit: value };
        }
        let p = BigUint::from(prime);
        let mut v = valuation;
        let mut w = width;
        loop {
            let (q, r) = value.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            value = q;
            v += 1;
            w -= 1;
        }
        Padic { prime, precision: w, valuation: v, unit: value }
    }

    fn add_ref(&self, other: &Padic) -> Padic {
        self.check_prime(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let v = self.valuation.min(other.valuation);
        let cap = (self.valuation + self.precision as i64).min(other.valuation + other.precision as i64);
        let width = (cap - v) as u32;
        let modulus = pow_big(self.prime, width);
        let shifted = |x: &Padic| -> BigUint {
            let shift = x.valuation - v;
            if shift >= width as i64 {
                BigUint::zero()
            } else {
                (&x.unit * pow_big(x.prime, shift as u32)) % &modulus
            }
        };
        let sum = (shifted(self) + shifted(other)) % &modulus;
        Padic::normalize(self.prime, width, v, sum)
    }

    fn mul_ref(&self, other: &Padic) -> Padic {
        self.check_prime(other);
        if self.is_zero() || other.is_zero() {
            return Padic::zero(self.context());
        }
        let v = self.valuation + other.valuation;
        if v > VALUATION_LIMIT {
            return Padic::zero(self.context());
        }
        let prec = self.precision.min(other.precision);
        let modulus = pow_big(self.prime, prec);
        let unit = (&self.unit * &other.unit) % modulus;
        Padic { prime: self.prime, precision: prec, valuation: v, unit }
    }

    fn neg_ref(&self) -> Padic {
        if self.is_zero() {
            return self.clone();
        }
        let modulus = pow_big(self.prime, self.precision);
        Padic {
            prime: self.prime,
            precision: self.precision,
            valuation: self.valuation,
            unit: modulus - &self.unit,
        }
    }

    pub fn inverse(&self) -> Result<Padic> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let modulus = BigInt::from(pow_big(self.prime, self.precision));
        let unit = BigInt::from(self.unit.clone());
        let ext = unit.extended_gcd(&modulus);
        debug_assert!(ext.gcd.is_one());
        let inv = ext.x.mod_floor(&modulus);
        Ok(Padic {
            prime: self.prime,
            precision: self.precision,
            valuation: -self.valuation,
            unit: inv.to_biguint().expect("nonnegative after mod_floor"),
        })
    }

    pub fn div(&self, other: &Padic) -> Result<Padic> {
        self.check_prime(other);
        Ok(self.mul_ref(&other.inverse()?))
    }

    pub fn pow(&self, mut e: u64) -> Padic {
        let mut base = self.clone();
        let mut acc = Padic::from_i64(self.context(), 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Teichmüller representative of an integral value: the limit of
    /// `x^(p^n)`, reached as a fixed point of `y -> y^p`.
    pub fn teichmuller(&self) -> Result<Padic> {
        if !self.is_integral() {
            return Err(Error::PreconditionFailed(format!(
                "teichmuller needs |x| <= 1, got valuation {}",
                self.valuation
            )));
        }
        if self.is_zero() || self.valuation > 0 {
            return Ok(Padic::zero(self.context()));
        }
        let mut y = self.clone();
        for _ in 0..=self.precision {
            let next = y.pow(self.prime as u64);
            if next == y {
                return Ok(next);
            }
            y = next;
        }
        Ok(y)
    }

    /// The Pontryagin pairing value of this scalar: its class in `Q_p/Z_p`,
    /// returned as `(numerator, k)` meaning `numerator / p^k`.
    pub fn fractional_part(&self) -> Result<(BigUint, u32)> {
        if self.is_integral() {
            return Ok((BigUint::zero(), 0));
        }
        let k = (-self.valuation) as u32;
        if self.precision < k {
            return Err(Error::PrecisionExhausted { needed: k as i64, available: self.precision as i64 });
        }
        Ok((&self.unit % pow_big(self.prime, k), k))
    }

    /// Base-p digits of the unit, little-endian, exactly `precision` of them.
    pub fn unit_digits(&self) -> Vec<u32> {
        let p = BigUint::from(self.prime);
        let mut n = self.unit.clone();
        let mut out = Vec::with_capacity(self.precision as usize);
        for _ in 0..self.precision {
            let (q, r) = n.div_rem(&p);
            out.push(r.to_u32().unwrap_or(0));
            n = q;
        }
        out
    }

    /// Parses the textual scalar form `p^v * d` (little-endian unit digits)
    /// or `0`. Plain integers and fractions such as `-3` or `2/9` are also
    /// accepted and taken at the context precision.
    pub fn parse(ctx: Context, text: &str) -> Result<Padic> {
        let s = text.trim();
        if s == "0" {
            return Ok(Padic::zero(ctx));
        }
        if let Some(rest) = s.strip_prefix("p^") {
            let (v, digits) = rest
                .split_once('*')
                .ok_or_else(|| Error::Parse(format!("missing '*' in scalar {s:?}")))?;
            let valuation: i64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad valuation in {s:?}")))?;
            let digits = digits.trim();
            let parsed: Vec<u32> = if ctx.prime < 10 {
                digits
                    .chars()
                    .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad digit {c:?}"))))
                    .collect::<Result<_>>()?
            } else {
                digits
                    .split('.')
                    .map(|d| d.parse::<u32>().map_err(|_| Error::Parse(format!("bad digit {d:?}"))))
                    .collect::<Result<_>>()?
            };
            if parsed.is_empty() {
                return Err(Error::Parse(format!("no unit digits in {s:?}")));
            }
            let mut unit = BigUint::zero();
            for &d in parsed.iter().rev() {
                if d >= ctx.prime {
                    return Err(Error::Parse(format!("digit {d} out of range for p = {}", ctx.prime)));
                }
                unit = unit * BigUint::from(ctx.prime) + BigUint::from(d);
            }
            return Padic::from_parts(ctx.prime, valuation, unit, parsed.len() as u32)
                .map_err(|e| Error::Parse(e.to_string()));
        }
        let parse_int = |t: &str| -> Result<BigInt> {
            t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad scalar {s:?}")))
        };
        if let Some((n, d)) = s.split_once('/') {
            let n = Padic::from_bigint(ctx, &parse_int(n)?);
            let d = Padic::from_bigint(ctx, &parse_int(d)?);
            return n.div(&d);
        }
        Ok(Padic::from_bigint(ctx, &parse_int(s)?))
    }
}

/// Equality at the common precision: the difference cancels to zero.
impl PartialEq for Padic {
    fn eq(&self, other: &Padic) -> bool {
        if self.prime != other.prime {
            return false;
        }
        match (self.is_zero(), other.is_zero()) {
            (true, true) => true,
            (false, false) => {
                if self.valuation != other.valuation {
                    return false;
                }
                let m = pow_big(self.prime, self.precision.min(other.precision));
                &self.unit % &m == &other.unit % &m
            }
            _ => false,
        }
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let digits = self.unit_digits();
        let body: String = if self.prime < 10 {
            digits.iter().map(|d| char::from_digit(*d, 10).unwrap_or('?')).collect()
        } else {
            digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(".")
        };
        write!(f, "p^{} * {}", self.valuation, body)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl<'a> $tr<&'a Padic> for &'a Padic {
            type Output = Padic;
            fn $method(self, rhs: &'a Padic) -> Padic {
                self.$imp(rhs)
            }
        }
        impl $tr<Padic> for Padic {
            type Output = Padic;
            fn $method(self, rhs: Padic) -> Padic {
                (&self).$imp(&rhs)
            }
        }
        impl<'a> $tr<&'a Padic> for Padic {
            type Output = Padic;
            fn $method(self, rhs: &'a Padic) -> Padic {
                (&self).$imp(rhs)
            }
        }
    };
}

impl Padic {
    fn sub_ref(&self, other: &Padic) -> Padic {
        self.add_ref(&other.neg_ref())
    }
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_ref()
    }
}

impl Neg for &Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_ref()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Field operation on two scalars over the same prime.
pub fn padic_arith(x: &Padic, y: &Padic, op: ArithOp) -> Result<Padic> {
    if x.prime != y.prime {
        return Err(Error::PrimeMismatch { left: x.prime, right: y.prime });
    }
    Ok(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => x.div(y)?,
    })
}
