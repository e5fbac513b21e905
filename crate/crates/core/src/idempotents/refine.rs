//! Refining near-idempotents and conjugating nearby idempotents.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::idempotents::pm::pm_polynomial;
use crate::matrix::Matrix;
use crate::padic::Valuation;

/// Outcome of [`idempotent_refine`].
#[derive(Clone, Debug)]
pub struct Refinement {
    pub value: Matrix,
    /// Index of the last polynomial evaluated; 0 when no iteration ran.
    pub m: u64,
    /// `(m, valuation of |P_m(a) - P_(m/2)(a)|)`.
    pub trace: Vec<(u64, Valuation)>,
    /// Valuation of `|a - e|`.
    pub distance: Valuation,
}

/// Valuation of the operator norm; `Infinite` for zero.
pub fn norm_valuation(m: &Matrix) -> Valuation {
    m.norm().exponent
}

fn finite_or(v: Valuation, fallback: i64) -> i64 {
    v.finite().unwrap_or(fallback)
}

/// The idempotent limit of `P_m(a)`, evaluated for `m = 2, 4, 8, ...` until
/// consecutive values agree to `p^-target` and the value is idempotent to
/// the same accuracy. Needs `|a^2 - a| < 1/|a|^2`.
pub fn idempotent_refine(a: &Matrix, target: i64, max_m: u64) -> Result<Refinement> {
    let ctx = a.context();
    let alpha = norm_valuation(a);
    // |a| < 1, including a = 0: the zero idempotent is within distance |a| < 1
    if alpha.at_least(1) {
        return Ok(Refinement { value: Matrix::zero(ctx), m: 0, trace: Vec::new(), distance: alpha });
    }
    let alpha = finite_or(alpha, 0);
    let defect = norm_valuation(&a.mul(a).sub(a));
    if !defect.at_least(-2 * alpha + 1) {
        return Err(Error::PreconditionFailed(alloc::format!(
            "need |a^2 - a| < 1/|a|^2: valuation of a^2 - a is {defect}, of a is {alpha}"
        )));
    }
    if defect.is_infinite() {
        return Ok(Refinement { value: a.clone(), m: 1, trace: Vec::new(), distance: Valuation::Infinite });
    }
    let mut current = a.clone();
    let mut m = 1;
    let mut trace = Vec::new();
    loop {
        if m >= max_m {
            return Err(Error::NoConvergence { iterations: trace.len() });
        }
        m *= 2;
        let next = a.eval_poly(&pm_polynomial(m).to_padic(ctx));
        let diff = norm_valuation(&next.sub(&current));
        trace.push((m, diff));
        current = next;
        if diff.at_least(target) && current.is_idempotent_within(target) {
            break;
        }
    }
    let distance = norm_valuation(&a.sub(&current));
    // |a - e| < min(1/|a|, 1) = p^alpha
    if !distance.at_least(-alpha + 1) {
        return Err(Error::PreconditionFailed(alloc::format!(
            "refined idempotent left the ball: valuation of a - e is {distance}"
        )));
    }
    Ok(Refinement { value: current, m, trace, distance })
}

/// An invertible `u` with `f = u e u^-1`.
#[derive(Clone, Debug)]
pub struct EquivalenceWitness {
    pub u: Matrix,
    pub u_inv: Matrix,
    /// Neumann series terms summed for `u_inv`.
    pub terms: usize,
}

impl EquivalenceWitness {
    pub fn identity(ctx: crate::padic::Context) -> Self {
        EquivalenceWitness { u: Matrix::identity(ctx), u_inv: Matrix::identity(ctx), terms: 0 }
    }

    /// `u u_inv = u_inv u = 1` and `u e u_inv = f`, each to `p^-target`.
    pub fn verify(&self, e: &Matrix, f: &Matrix, target: i64) -> bool {
        let ctx = e.context();
        let one = Matrix::identity(ctx);
        self.u.mul(&self.u_inv).sub(&one).norm().within(target)
            && self.u_inv.mul(&self.u).sub(&one).norm().within(target)
            && self.u.mul(e).mul(&self.u_inv).sub(f).norm().within(target)
    }
}

fn require_idempotent(x: &Matrix, name: &str, target: i64) -> Result<()> {
    if x.is_idempotent_within(target) {
        Ok(())
    } else {
        Err(Error::PreconditionFailed(alloc::format!(
            "{name} is not idempotent: valuation of {name}^2 - {name} is {}",
            norm_valuation(&x.mul(x).sub(x))
        )))
    }
}

/// `u = 1 - f - e + 2fe`, inverted through the Neumann series in
/// `1 - u = f + e - 2fe`. Needs `e != 0` and `|e - f| < 1/|e|`.
pub fn idempotent_equivalence(e: &Matrix, f: &Matrix, target: i64, budget: usize) -> Result<EquivalenceWitness> {
    let ctx = e.context();
    if e.is_zero() {
        return Err(Error::PreconditionFailed("e must be nonzero".into()));
    }
    require_idempotent(e, "e", target)?;
    require_idempotent(f, "f", target)?;
    let eps = finite_or(norm_valuation(e), 0);
    let dist = norm_valuation(&e.sub(f));
    if !dist.at_least(-eps + 1) {
        return Err(Error::PreconditionFailed(alloc::format!(
            "need |e - f| < 1/|e|: valuation of e - f is {dist}, of e is {eps}"
        )));
    }
    let fe = f.mul(e);
    let w = f.add(e).sub(&fe.add(&fe));
    if !norm_valuation(&w).at_least(1) {
        return Err(Error::PreconditionFailed("|f + e - 2fe| is not below 1".into()));
    }
    let one = Matrix::identity(ctx);
    let u = one.sub(&w);
    let mut sum = one.clone();
    let mut term = one;
    let mut terms = 1;
    loop {
        if terms > budget {
            return Err(Error::NoConvergence { iterations: budget });
        }
        term = term.mul(&w);
        let v = norm_valuation(&term);
        let settled = match (v, sum.max_absolute_precision()) {
            (Valuation::Infinite, _) => true,
            (Valuation::Finite(v), Some(cap)) => v >= cap,
            (Valuation::Finite(_), None) => false,
        };
        if settled {
            break;
        }
        sum = sum.add(&term);
        terms += 1;
    }
    Ok(EquivalenceWitness { u, u_inv: sum, terms })
}

/// Refines `a` to `e_a` and conjugates `e` onto it. Needs
/// `|e - a| < 1/|e|^3`.
pub fn near_idempotent_equivalence(
    e: &Matrix,
    a: &Matrix,
    target: i64,
    max_m: u64,
    budget: usize,
) -> Result<(Refinement, EquivalenceWitness)> {
    if e.is_zero() {
        return Err(Error::PreconditionFailed("e must be nonzero".into()));
    }
    require_idempotent(e, "e", target)?;
    let eps = finite_or(norm_valuation(e), 0);
    let dist = norm_valuation(&e.sub(a));
    if !dist.at_least(-3 * eps + 1) {
        return Err(Error::PreconditionFailed(alloc::format!(
            "need |e - a| < 1/|e|^3: valuation of e - a is {dist}, of e is {eps}"
        )));
    }
    let refined = idempotent_refine(a, target, max_m)?;
    let witness = idempotent_equivalence(e, &refined.value, target, budget)?;
    Ok((refined, witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{Context, Padic};

    #[test]
    fn diagonal_example() {
        let c = Context::new(3, 40).unwrap();
        let a = Matrix::diagonal(c, [(0, c.int(28)), (1, c.int(27))], c.zero());
        let r = idempotent_refine(&a, 30, 256).unwrap();
        let expected = Matrix::diagonal(c, [(0, c.one())], c.zero());
        assert!(r.value.sub(&expected).norm().within(30));
        assert!(r.distance.at_least(1));
    }

    #[test]
    fn already_idempotent_and_small() {
        let c = Context::new(3, 20).unwrap();
        let e = Matrix::from_entries(c, [(0, 0, c.one()), (0, 1, c.int(5))]);
        assert_eq!(idempotent_refine(&e, 20, 64).unwrap().value, e);
        assert!(idempotent_refine(&Matrix::zero(c), 20, 64).unwrap().value.is_zero());
        let small = Matrix::from_entries(c, [(0, 0, c.int(3))]);
        assert!(idempotent_refine(&small, 20, 64).unwrap().value.is_zero());
    }

    #[test]
    fn far_from_idempotent_is_rejected() {
        let c = Context::new(3, 20).unwrap();
        let a = Matrix::from_entries(c, [(0, 0, c.int(2))]);
        assert!(matches!(idempotent_refine(&a, 20, 64), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn equivalence_of_close_idempotents() {
        let c = Context::new(3, 30).unwrap();
        let e = Matrix::diagonal(c, [(0, c.one())], c.zero());
        let f = e.add(&Matrix::from_entries(c, [(0, 1, c.int(3))]));
        let w = idempotent_equivalence(&e, &f, 30, 200).unwrap();
        assert!(w.verify(&e, &f, 30));
        let same = idempotent_equivalence(&e, &e, 30, 200).unwrap();
        assert_eq!(same.u, Matrix::identity(c));
    }

    #[test]
    fn near_equivalence_boundary_is_strict() {
        let c = Context::new(3, 30).unwrap();
        let e = Matrix::diagonal(c, [(0, c.one())], c.zero());
        // |e| = 1, so |e - a| must be below 1
        let a = e.add(&Matrix::from_entries(c, [(1, 1, c.one())]));
        assert!(matches!(near_idempotent_equivalence(&e, &a, 30, 64, 200), Err(Error::PreconditionFailed(_))));
        let a = e.add(&Matrix::from_entries(c, [(1, 0, Padic::p_power(c, 4))]));
        let (r, w) = near_idempotent_equivalence(&e, &a, 30, 64, 200).unwrap();
        assert!(w.verify(&e, &r.value, 30));
    }
}
