//! The sum-ring generators of the contractive operators and the infinite
//! repetition `a -> a^inf`.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::operator::{IndexRule, Operator, PairingScheme, SumRingMap};
use crate::padic::Context;
use crate::vector::PadicVector;

/// `alpha_0, beta_0, alpha_1, beta_1` for a splitting of `N` into blocks.
#[derive(Clone, Debug)]
pub struct SumRing {
    pub scheme: PairingScheme,
    pub alpha0: Operator,
    pub beta0: Operator,
    pub alpha1: Operator,
    pub beta1: Operator,
}

/// A failed relation: its name and the basis index it failed on.
pub type RelationFailure = (&'static str, usize);

pub fn sum_ring_generators(ctx: Context, scheme: PairingScheme) -> SumRing {
    let make = |map| Operator::permutation_like(ctx, IndexRule::SumRing(map, scheme));
    SumRing {
        scheme,
        alpha0: make(SumRingMap::Alpha0),
        beta0: make(SumRingMap::Beta0),
        alpha1: make(SumRingMap::Alpha1),
        beta1: make(SumRingMap::Beta1),
    }
}

fn apply_all(ops: &[&Operator], v: &PadicVector) -> PadicVector {
    ops.iter().rev().fold(v.clone(), |acc, op| op.apply(&acc))
}

impl SumRing {
    fn context(&self) -> Context {
        self.alpha0.context()
    }

    pub fn block(&self, x: usize) -> usize {
        self.scheme.unpair(x).0
    }

    /// Checks `alpha_0 beta_0 = 1`, `alpha_1 beta_1 = 1` and
    /// `beta_0 alpha_0 + beta_1 alpha_1 = 1` on `delta_x` for `x` in `range`.
    pub fn relation_failures(&self, range: Range<usize>) -> Vec<RelationFailure> {
        let ctx = self.context();
        let mut failures = Vec::new();
        for x in range {
            let d = PadicVector::basis(ctx, x);
            if apply_all(&[&self.alpha0, &self.beta0], &d) != d {
                failures.push(("alpha0 beta0 = 1", x));
            }
            if apply_all(&[&self.alpha1, &self.beta1], &d) != d {
                failures.push(("alpha1 beta1 = 1", x));
            }
            let split = apply_all(&[&self.beta0, &self.alpha0], &d).add(&apply_all(&[&self.beta1, &self.alpha1], &d));
            if split != d {
                failures.push(("beta0 alpha0 + beta1 alpha1 = 1", x));
            }
        }
        failures
    }

    /// `beta_0 x alpha_0 + beta_1 y alpha_1`.
    pub fn boxplus(&self, x: &Operator, y: &Operator) -> Operator {
        let ctx = self.context();
        Operator::sum(
            ctx,
            alloc::vec![
                Operator::product(ctx, alloc::vec![self.beta0.clone(), x.clone(), self.alpha0.clone()]),
                Operator::product(ctx, alloc::vec![self.beta1.clone(), y.clone(), self.alpha1.clone()]),
            ],
        )
    }

    /// `sum_{n <= depth} beta_1^n beta_0 a alpha_0 alpha_1^n`: a copy of `a`
    /// on every block up to `depth`.
    pub fn infinite_sum(&self, a: &Operator, depth: usize) -> Result<Operator> {
        let ctx = self.context();
        if !a.norm().is_contractive() {
            return Err(Error::PreconditionFailed("infinite sum needs |a| <= 1".into()));
        }
        let terms = (0..=depth)
            .map(|n| {
                let mut factors = Vec::with_capacity(2 * n + 3);
                factors.extend(core::iter::repeat_n(self.beta1.clone(), n));
                factors.extend([self.beta0.clone(), a.clone(), self.alpha0.clone()]);
                factors.extend(core::iter::repeat_n(self.alpha1.clone(), n));
                Operator::product(ctx, factors)
            })
            .collect();
        Ok(Operator::sum(ctx, terms))
    }

    /// Basis indices in `range` where `beta_0 a alpha_0 + beta_1 a_inf alpha_1`
    /// and `a_inf` differ.
    pub fn infinite_sum_failures(&self, a: &Operator, a_inf: &Operator, range: Range<usize>) -> Vec<usize> {
        let lhs = self.boxplus(a, a_inf);
        range.filter(|&x| lhs.column(x) != a_inf.column(x)).collect()
    }
}
