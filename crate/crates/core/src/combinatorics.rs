//! Digit sums, factorial valuations and binomial coefficients.

use alloc::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::padic::Padic;

/// Sum of the base-`p` digits of `n`.
pub fn digit_sum(mut n: u64, p: u32) -> u64 {
    let p = p as u64;
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// `v_p(n!) = (n - s_p(n)) / (p - 1)`.
pub fn factorial_valuation(n: u64, p: u32) -> u64 {
    (n - digit_sum(n, p)) / (p as u64 - 1)
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Integer binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial_int(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `C(n, k)` for a possibly negative integer `n`.
pub fn binomial_signed(n: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i as i64);
    }
    num / BigInt::from(factorial(k))
}

/// `binom(x, k) = x(x-1)...(x-k+1)/k!` for `x` in `Z_p`.
///
/// The division by `k!` costs `v_p(k!)` digits of absolute precision; the
/// result is capped accordingly.
pub fn binomial_padic(x: &Padic, k: u64) -> Result<Padic> {
    if !x.is_integral() {
        return Err(Error::PreconditionFailed("binomial argument must lie in Z_p".into()));
    }
    let ctx = x.context();
    if k == 0 {
        return Ok(Padic::one(ctx));
    }
    let loss = factorial_valuation(k, ctx.prime()) as i64;
    // exact zero has unlimited absolute precision
    let available = x.absolute_precision().unwrap_or(ctx.precision() as i64);
    if loss >= available {
        return Err(Error::PrecisionExhausted { needed: loss + 1, available });
    }
    let mut num = x.clone();
    for j in 1..k {
        num = num * (x - &Padic::from_i64(ctx, j as i64));
    }
    let value = num.div(&Padic::from_biguint(ctx, &factorial(k)))?;
    Ok(value.cap_absolute(available - loss))
}

/// Coefficients `l!/((m+n-l)!(l-m)!(l-n)!)` of `binom(x,l)` in the product
/// `binom(x,m) binom(x,n)`, for `max(m,n) <= l <= m+n`.
pub fn vandermonde_coefficients(m: u64, n: u64) -> BTreeMap<u64, BigUint> {
    (m.max(n)..=m + n)
        .map(|l| {
            let c = factorial(l) / (factorial(m + n - l) * factorial(l - m) * factorial(l - n));
            (l, c)
        })
        .collect()
}
