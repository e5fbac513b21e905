//! The refinement polynomials `P_m`: the unique integer polynomials of
//! degree at most `2m - 1` with `P_m(0) = 0`, `P_m(1) = 1` and the first
//! `m - 1` derivatives vanishing at both 0 and 1.

use alloc::vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinatorics::binomial_int;
use crate::poly::IntPolynomial;

/// `P_m(x) = sum_{k=m}^{2m-1} x^k sum_{i=k-m+1}^{m} (-1)^(i+1) C(m,i) C(m-1+k-i, k-i)`.
pub fn pm_polynomial(m: u64) -> IntPolynomial {
    assert!(m >= 1, "P_m is defined for m >= 1");
    let mut coeffs = vec![BigInt::zero(); 2 * m as usize];
    for k in m..2 * m {
        let mut c = BigInt::zero();
        for i in k - m + 1..=m {
            let term = BigInt::from(binomial_int(m, i) * binomial_int(m - 1 + k - i, k - i));
            if i % 2 == 1 {
                c += term;
            } else {
                c -= term;
            }
        }
        coeffs[k as usize] = c;
    }
    let p = IntPolynomial::new(coeffs);
    assert!(satisfies_pm_conditions(&p, m), "P_{m} failed its defining conditions");
    p
}

/// Checks the interpolation conditions defining `P_m` by exact
/// differentiation.
pub fn satisfies_pm_conditions(p: &IntPolynomial, m: u64) -> bool {
    if p.degree().is_some_and(|d| d as u64 > 2 * m - 1) {
        return false;
    }
    let zero = BigInt::zero();
    let one = BigInt::one();
    if p.eval(&zero) != zero || p.eval(&one) != one {
        return false;
    }
    let mut d = p.clone();
    for _ in 1..m {
        d = d.derivative();
        if !d.eval(&zero).is_zero() || !d.eval(&one).is_zero() {
            return false;
        }
    }
    true
}
