//! Finitely supported vectors of `Q_p(N)` and the `Q_p/Z_p`-valued pairing.

use alloc::collections::BTreeMap;
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::Result;
use crate::padic::{pow_big, Context, Padic, ValuationBound};

/// A vector with finite support; coordinates outside the support are zero
/// and exact zeros are never stored.
#[derive(Clone, Debug, Default)]
pub struct PadicVector {
    support: BTreeMap<usize, Padic>,
}

impl PadicVector {
    pub fn zero() -> Self {
        PadicVector::default()
    }

    /// `delta_i`.
    pub fn basis(ctx: Context, i: usize) -> Self {
        let mut v = PadicVector::zero();
        v.set(i, Padic::one(ctx));
        v
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, Padic)>>(entries: I) -> Self {
        let mut v = PadicVector::zero();
        for (i, x) in entries {
            v.add_at(i, &x);
        }
        v
    }

    pub fn get(&self, i: usize) -> Option<&Padic> {
        self.support.get(&i)
    }

    pub fn get_or_zero(&self, i: usize, ctx: Context) -> Padic {
        self.support.get(&i).cloned().unwrap_or_else(|| Padic::zero(ctx))
    }

    pub fn set(&mut self, i: usize, x: Padic) {
        if x.is_zero() {
            self.support.remove(&i);
        } else {
            self.support.insert(i, x);
        }
    }

    pub fn add_at(&mut self, i: usize, x: &Padic) {
        if x.is_zero() {
            return;
        }
        let next = match self.support.get(&i) {
            Some(cur) => cur + x,
            None => x.clone(),
        };
        self.set(i, next);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Padic)> {
        self.support.iter().map(|(i, x)| (*i, x))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.support.keys().next_back().copied()
    }

    /// `max_i |xi(i)|`.
    pub fn norm(&self) -> ValuationBound {
        self.support.values().map(Padic::norm).max().unwrap_or(ValuationBound::ZERO)
    }

    pub fn scale(&self, s: &Padic) -> Self {
        PadicVector::from_entries(self.support.iter().map(|(i, x)| (*i, x * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, None);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, x) in other.iter() {
            out.add_at(i, &-x);
        }
        out
    }

    /// `self += s * other` (or `self += other` when `s` is `None`).
    pub fn add_assign_scaled(&mut self, other: &Self, s: Option<&Padic>) {
        for (i, x) in other.iter() {
            match s {
                Some(s) => self.add_at(i, &(x * s)),
                None => self.add_at(i, x),
            }
        }
    }

    /// Coordinates restricted to indices `< bound`.
    pub fn restrict(&self, bound: usize) -> Self {
        PadicVector { support: self.support.range(..bound).map(|(i, x)| (*i, x.clone())).collect() }
    }

    /// Equal at the common precision.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl PartialEq for PadicVector {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

impl fmt::Display for PadicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, x)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}: {x}")?;
        }
        f.write_str("}")
    }
}

/// An element `numerator / p^exponent` of `Q_p/Z_p` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairingValue {
    pub numerator: BigUint,
    pub exponent: u32,
}

impl PairingValue {
    pub fn zero() -> Self {
        PairingValue { numerator: BigUint::zero(), exponent: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Canonical form of `num / p^k` reduced modulo 1.
    pub fn reduced(prime: u32, num: BigUint, k: u32) -> Self {
        let mut num = num % pow_big(prime, k);
        let mut k = k;
        let p = BigUint::from(prime);
        while k > 0 && !num.is_zero() && (&num % &p).is_zero() {
            num /= &p;
            k -= 1;
        }
        if num.is_zero() {
            return PairingValue::zero();
        }
        PairingValue { numerator: num, exponent: k }
    }
}

impl fmt::Display for PairingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("0")
        } else {
            write!(f, "{}/p^{}", self.numerator, self.exponent)
        }
    }
}

/// `<xi, eta>`: the class of `sum_i xi(i) eta(i)` in `Q_p/Z_p`.
pub fn pairing(xi: &PadicVector, eta: &PadicVector) -> Result<PairingValue> {
    let mut total: Option<Padic> = None;
    for (i, x) in xi.iter() {
        if let Some(y) = eta.get(i) {
            let term = x * y;
            total = Some(match total {
                Some(t) => t + term,
                None => term,
            });
        }
    }
    let Some(total) = total else {
        return Ok(PairingValue::zero());
    };
    let prime = total.prime();
    let (num, k) = total.fractional_part()?;
    Ok(PairingValue::reduced(prime, num, k))
}
