//! Lifting idempotents modulo the compact operators.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::idempotents::refine::{idempotent_refine, norm_valuation, Refinement};
use crate::matrix::Matrix;

/// An idempotent `e` with `e - a` compact.
#[derive(Clone, Debug)]
pub struct Lift {
    pub value: Matrix,
    /// Powers with `|a^m - a^n| < 1`.
    pub n: u64,
    pub m: u64,
    /// `b = a^(k (m - n))` was refined.
    pub k: u64,
    pub refinement: Refinement,
}

/// Finds `n < m <= budget` with `|a^m - a^n| < 1`, smallest `m - n` first,
/// then refines `a^(k (m - n))` for the least `k` with `k (m - n) > n`.
/// Needs `|a| <= 1` and `a^2 - a` compact.
pub fn idempotent_lift(a: &Matrix, target: i64, budget: u64, max_m: u64) -> Result<Lift> {
    if !a.norm().is_contractive() {
        return Err(Error::PreconditionFailed("lift needs |a| <= 1".into()));
    }
    if !a.mul(a).sub(a).is_compact() {
        return Err(Error::PreconditionFailed("a^2 - a is not compact".into()));
    }
    if budget < 2 {
        return Err(Error::SearchExhausted { budget: budget as usize });
    }
    // powers[i] = a^(i + 1)
    let mut powers: Vec<Matrix> = Vec::with_capacity(budget as usize);
    powers.push(a.clone());
    for _ in 1..budget {
        let next = powers.last().expect("nonempty").mul(a);
        powers.push(next);
    }
    let power = |i: u64| &powers[i as usize - 1];
    let (n, m) = (1..budget)
        .flat_map(|d| (1..=budget - d).map(move |n| (n, n + d)))
        .find(|&(n, m)| norm_valuation(&power(m).sub(power(n))).at_least(1))
        .ok_or(Error::SearchExhausted { budget: budget as usize })?;
    let d = m - n;
    let k = n / d + 1;
    let b = if k * d <= budget { power(k * d).clone() } else { a.pow(k * d) };
    let refinement = idempotent_refine(&b, target, max_m)?;
    let value = refinement.value.clone();
    if !value.is_idempotent_within(target) {
        return Err(Error::NoConvergence { iterations: refinement.trace.len() });
    }
    if !value.sub(a).is_compact() {
        return Err(Error::PreconditionFailed("lift is not a compact perturbation of a".into()));
    }
    Ok(Lift { value, n, m, k, refinement })
}
