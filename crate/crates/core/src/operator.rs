//! Bounded operators on `Q_p(N)` through structural representations.
//!
//! Every representation answers column and row queries with finitely
//! supported vectors. Representations built from finite matrices, constant
//! diagonals and the identity materialize into a [`Matrix`], where norms and
//! compactness are exact. Index maps with infinite domain (shifts and the
//! sum-ring generators) only answer column and row queries.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Roots;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::padic::{Context, Padic, ValuationBound};
use crate::vector::PadicVector;

/// A bijection `N x N -> N`; block `n` of the partition is the image of
/// `{n} x N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PairingScheme {
    /// `(n, m) -> (n + m)(n + m + 1)/2 + m`.
    #[default]
    Cantor,
    /// `(n, m) -> 2^n (2m + 1) - 1`.
    Dyadic,
}

impl PairingScheme {
    pub fn pair(self, block: usize, offset: usize) -> usize {
        match self {
            PairingScheme::Cantor => {
                let s = block.checked_add(offset).expect("index overflow");
                s.checked_mul(s + 1).expect("index overflow") / 2 + offset
            }
            PairingScheme::Dyadic => {
                let odd = offset.checked_mul(2).and_then(|x| x.checked_add(1)).expect("index overflow");
                let scale = 1usize.checked_shl(block as u32).filter(|_| block < usize::BITS as usize);
                scale.and_then(|s| s.checked_mul(odd)).expect("index overflow") - 1
            }
        }
    }

    /// Inverse of [`PairingScheme::pair`]: `(block, offset)`.
    pub fn unpair(self, x: usize) -> (usize, usize) {
        match self {
            PairingScheme::Cantor => {
                let z = x as u128;
                let mut w = ((8 * z + 1).sqrt() - 1) / 2;
                while w * (w + 1) / 2 > z {
                    w -= 1;
                }
                let t = w * (w + 1) / 2;
                let m = (z - t) as usize;
                (w as usize - m, m)
            }
            PairingScheme::Dyadic => {
                let y = x + 1;
                let n = y.trailing_zeros() as usize;
                (n, ((y >> n) - 1) / 2)
            }
        }
    }
}

/// The four index maps behind the sum-ring generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SumRingMap {
    /// Block 0 onto `N`, other blocks to nothing.
    Alpha0,
    /// `N` onto block 0.
    Beta0,
    /// Block `n` onto block `n - 1`, block 0 to nothing.
    Alpha1,
    /// Block `n` onto block `n + 1`.
    Beta1,
}

/// Where column `j` of an index map sends its single entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexRule {
    /// Defined only on the listed columns.
    Finite(BTreeMap<usize, usize>),
    /// `j -> j + k`.
    Shift(usize),
    /// `j -> j - k` for `j >= k`.
    BackShift(usize),
    SumRing(SumRingMap, PairingScheme),
}

impl IndexRule {
    pub fn dest(&self, j: usize) -> Option<usize> {
        match self {
            IndexRule::Finite(map) => map.get(&j).copied(),
            IndexRule::Shift(k) => Some(j + k),
            IndexRule::BackShift(k) => j.checked_sub(*k),
            IndexRule::SumRing(map, scheme) => {
                let (n, m) = scheme.unpair(j);
                match map {
                    SumRingMap::Alpha0 => (n == 0).then_some(m),
                    SumRingMap::Beta0 => Some(scheme.pair(0, j)),
                    SumRingMap::Alpha1 => n.checked_sub(1).map(|n| scheme.pair(n, m)),
                    SumRingMap::Beta1 => Some(scheme.pair(n + 1, m)),
                }
            }
        }
    }

    /// All columns `j` with `dest(j) = i`.
    pub fn preimage(&self, i: usize) -> Vec<usize> {
        match self {
            IndexRule::Finite(map) => map.iter().filter(|(_, d)| **d == i).map(|(j, _)| *j).collect(),
            IndexRule::Shift(k) => i.checked_sub(*k).into_iter().collect(),
            IndexRule::BackShift(k) => vec![i + k],
            IndexRule::SumRing(map, scheme) => {
                let (n, m) = scheme.unpair(i);
                match map {
                    SumRingMap::Alpha0 => vec![scheme.pair(0, i)],
                    SumRingMap::Beta0 => if n == 0 { vec![m] } else { vec![] },
                    SumRingMap::Alpha1 => vec![scheme.pair(n + 1, m)],
                    SumRingMap::Beta1 => n.checked_sub(1).map(|n| scheme.pair(n, m)).into_iter().collect(),
                }
            }
        }
    }

    /// The domain when it is finite.
    pub fn finite_domain(&self) -> Option<Vec<usize>> {
        match self {
            IndexRule::Finite(map) => Some(map.keys().copied().collect()),
            _ => None,
        }
    }

    pub fn is_injective(&self) -> bool {
        match self {
            IndexRule::Finite(map) => {
                let mut seen: Vec<usize> = map.values().copied().collect();
                seen.sort_unstable();
                seen.windows(2).all(|w| w[0] != w[1])
            }
            _ => true,
        }
    }

    /// The rule sending `dest(j)` back to `j`, for injective rules.
    pub fn inverse(&self) -> Option<IndexRule> {
        Some(match self {
            IndexRule::Finite(map) => {
                if !self.is_injective() {
                    return None;
                }
                IndexRule::Finite(map.iter().map(|(j, d)| (*d, *j)).collect())
            }
            IndexRule::Shift(k) => IndexRule::BackShift(*k),
            IndexRule::BackShift(k) => IndexRule::Shift(*k),
            IndexRule::SumRing(map, scheme) => {
                let inv = match map {
                    SumRingMap::Alpha0 => SumRingMap::Beta0,
                    SumRingMap::Beta0 => SumRingMap::Alpha0,
                    SumRingMap::Alpha1 => SumRingMap::Beta1,
                    SumRingMap::Beta1 => SumRingMap::Alpha1,
                };
                IndexRule::SumRing(inv, *scheme)
            }
        })
    }
}

#[derive(Clone, Debug)]
pub enum Repr {
    Finite(BTreeMap<(usize, usize), Padic>),
    /// Column `j` is `coeff(j) * delta_dest(j)`, or zero off the domain.
    IndexMap { rule: IndexRule, coeffs: BTreeMap<usize, Padic>, default_coeff: Padic },
    Diagonal { entries: BTreeMap<usize, Padic>, default: Padic },
    Identity,
    Sum(Vec<Operator>),
    /// `A_1 A_2 ... A_k`: the last factor acts first.
    Product(Vec<Operator>),
    ScalarMul(Padic, Box<Operator>),
    Adjoint(Box<Operator>),
}

#[derive(Clone, Debug)]
pub struct Operator {
    ctx: Context,
    repr: Repr,
}

fn require_contractive(x: &Padic, what: &str) -> Result<()> {
    if x.is_integral() {
        Ok(())
    } else {
        Err(Error::InvalidInput(alloc::format!("{what} must have norm at most 1, got {x}")))
    }
}

impl Operator {
    pub fn identity(ctx: Context) -> Self {
        Operator { ctx, repr: Repr::Identity }
    }

    pub fn zero(ctx: Context) -> Self {
        Operator { ctx, repr: Repr::Finite(BTreeMap::new()) }
    }

    pub fn finite<I: IntoIterator<Item = (usize, usize, Padic)>>(ctx: Context, entries: I) -> Self {
        let m = Matrix::from_entries(ctx, entries);
        Operator { ctx, repr: Repr::Finite(m.explicit().map(|(k, x)| (k, x.clone())).collect()) }
    }

    pub fn diagonal<I: IntoIterator<Item = (usize, Padic)>>(ctx: Context, entries: I, default: Padic) -> Result<Self> {
        require_contractive(&default, "diagonal default")?;
        let entries = entries.into_iter().filter(|(_, x)| x != &default).collect();
        Ok(Operator { ctx, repr: Repr::Diagonal { entries, default } })
    }

    pub fn index_map(
        ctx: Context,
        rule: IndexRule,
        coeffs: BTreeMap<usize, Padic>,
        default_coeff: Padic,
    ) -> Result<Self> {
        require_contractive(&default_coeff, "index map default coefficient")?;
        Ok(Operator { ctx, repr: Repr::IndexMap { rule, coeffs, default_coeff } })
    }

    /// Index map with every coefficient 1.
    pub fn permutation_like(ctx: Context, rule: IndexRule) -> Self {
        Operator { ctx, repr: Repr::IndexMap { rule, coeffs: BTreeMap::new(), default_coeff: ctx.one() } }
    }

    pub fn sum(ctx: Context, terms: Vec<Operator>) -> Self {
        Operator { ctx, repr: Repr::Sum(terms) }
    }

    pub fn product(ctx: Context, factors: Vec<Operator>) -> Self {
        Operator { ctx, repr: Repr::Product(factors) }
    }

    pub fn scalar_mul(s: Padic, op: Operator) -> Result<Self> {
        require_contractive(&s, "operator scalar")?;
        Ok(Operator { ctx: op.ctx, repr: Repr::ScalarMul(s, Box::new(op)) })
    }

    /// Lazy adjoint node; [`Operator::adjoint`] builds the transpose structurally.
    pub fn adjoint_of(op: Operator) -> Self {
        Operator { ctx: op.ctx, repr: Repr::Adjoint(Box::new(op)) }
    }

    /// Representation of a materialized matrix: a finite matrix, or a
    /// diagonal carrying the tail plus a finite off-diagonal part.
    pub fn from_matrix(m: &Matrix) -> Self {
        let ctx = m.context();
        if m.is_finite() {
            return Operator::finite(ctx, m.explicit().map(|((i, j), x)| (i, j, x.clone())));
        }
        let diag: BTreeMap<usize, Padic> =
            m.explicit().filter(|((i, j), _)| i == j).map(|((i, _), x)| (i, x.clone())).collect();
        let off: Vec<(usize, usize, Padic)> =
            m.explicit().filter(|((i, j), _)| i != j).map(|((i, j), x)| (i, j, x.clone())).collect();
        let d = Operator { ctx, repr: Repr::Diagonal { entries: diag, default: m.tail().clone() } };
        if off.is_empty() {
            d
        } else {
            Operator::sum(ctx, vec![d, Operator::finite(ctx, off)])
        }
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn column(&self, j: usize) -> PadicVector {
        match &self.repr {
            Repr::Finite(entries) => PadicVector::from_entries(
                entries.iter().filter(|((_, c), _)| *c == j).map(|((r, _), x)| (*r, x.clone())),
            ),
            Repr::IndexMap { rule, coeffs, default_coeff } => match rule.dest(j) {
                Some(d) => PadicVector::from_entries([(d, coeffs.get(&j).unwrap_or(default_coeff).clone())]),
                None => PadicVector::zero(),
            },
            Repr::Diagonal { entries, default } => {
                PadicVector::from_entries([(j, entries.get(&j).unwrap_or(default).clone())])
            }
            Repr::Identity => PadicVector::basis(self.ctx, j),
            Repr::Sum(terms) => {
                let mut acc = PadicVector::zero();
                for t in terms {
                    acc.add_assign_scaled(&t.column(j), None);
                }
                acc
            }
            Repr::Product(factors) => {
                let mut v = PadicVector::basis(self.ctx, j);
                for f in factors.iter().rev() {
                    v = f.apply(&v);
                }
                v
            }
            Repr::ScalarMul(s, op) => op.column(j).scale(s),
            Repr::Adjoint(op) => op.row(j),
        }
    }

    pub fn row(&self, i: usize) -> PadicVector {
        match &self.repr {
            Repr::Finite(entries) => {
                PadicVector::from_entries(entries.range((i, 0)..=(i, usize::MAX)).map(|((_, c), x)| (*c, x.clone())))
            }
            Repr::IndexMap { rule, coeffs, default_coeff } => PadicVector::from_entries(
                rule.preimage(i).into_iter().map(|j| (j, coeffs.get(&j).unwrap_or(default_coeff).clone())),
            ),
            Repr::Diagonal { .. } | Repr::Identity => self.column(i),
            Repr::Sum(terms) => {
                let mut acc = PadicVector::zero();
                for t in terms {
                    acc.add_assign_scaled(&t.row(i), None);
                }
                acc
            }
            Repr::Product(factors) => match factors.split_first() {
                None => PadicVector::basis(self.ctx, i),
                Some((first, rest)) => {
                    let mut v = first.row(i);
                    for f in rest {
                        v = f.apply_transpose(&v);
                    }
                    v
                }
            },
            Repr::ScalarMul(s, op) => op.row(i).scale(s),
            Repr::Adjoint(op) => op.column(i),
        }
    }

    /// `A_ij`.
    pub fn entry(&self, i: usize, j: usize) -> Padic {
        self.column(j).get_or_zero(i, self.ctx)
    }

    /// `A(xi)(i) = sum_j A_ij xi(j)`.
    pub fn apply(&self, xi: &PadicVector) -> PadicVector {
        match &self.repr {
            Repr::Identity => xi.clone(),
            Repr::Diagonal { entries, default } => {
                PadicVector::from_entries(xi.iter().map(|(i, x)| (i, x * entries.get(&i).unwrap_or(default))))
            }
            Repr::Finite(entries) => PadicVector::from_entries(
                entries.iter().filter_map(|((r, c), a)| xi.get(*c).map(|x| (*r, a * x))),
            ),
            Repr::Product(factors) => factors.iter().rev().fold(xi.clone(), |v, f| f.apply(&v)),
            Repr::ScalarMul(s, op) => op.apply(xi).scale(s),
            Repr::Adjoint(op) => op.apply_transpose(xi),
            _ => {
                let mut out = PadicVector::zero();
                for (j, x) in xi.iter() {
                    out.add_assign_scaled(&self.column(j), Some(x));
                }
                out
            }
        }
    }

    /// `A^T(eta)(j) = sum_i A_ij eta(i)`.
    pub fn apply_transpose(&self, eta: &PadicVector) -> PadicVector {
        match &self.repr {
            Repr::Identity | Repr::Diagonal { .. } => self.apply(eta),
            Repr::Finite(entries) => PadicVector::from_entries(
                entries.iter().filter_map(|((r, c), a)| eta.get(*r).map(|x| (*c, a * x))),
            ),
            Repr::Product(factors) => factors.iter().fold(eta.clone(), |v, f| f.apply_transpose(&v)),
            Repr::ScalarMul(s, op) => op.apply_transpose(eta).scale(s),
            Repr::Adjoint(op) => op.apply(eta),
            _ => {
                let mut out = PadicVector::zero();
                for (i, x) in eta.iter() {
                    out.add_assign_scaled(&self.row(i), Some(x));
                }
                out
            }
        }
    }

    /// Diagonal-plus-finite form, when the representation has one.
    pub fn materialize(&self) -> Result<Matrix> {
        let ctx = self.ctx;
        Ok(match &self.repr {
            Repr::Finite(entries) => Matrix::from_entries(ctx, entries.iter().map(|((i, j), x)| (*i, *j, x.clone()))),
            Repr::Diagonal { entries, default } => {
                Matrix::diagonal(ctx, entries.iter().map(|(i, x)| (*i, x.clone())), default.clone())
            }
            Repr::Identity => Matrix::identity(ctx),
            Repr::IndexMap { rule, coeffs, default_coeff } => {
                let domain: Vec<usize> = match rule.finite_domain() {
                    Some(d) => d,
                    None if default_coeff.is_zero() => coeffs.keys().copied().collect(),
                    None => return Err(Error::NotMaterializable("index map with infinite support")),
                };
                Matrix::from_entries(
                    ctx,
                    domain.into_iter().filter_map(|j| {
                        rule.dest(j).map(|d| (d, j, coeffs.get(&j).unwrap_or(default_coeff).clone()))
                    }),
                )
            }
            Repr::Sum(terms) => {
                let mut acc = Matrix::zero(ctx);
                for t in terms {
                    acc = acc.add(&t.materialize()?);
                }
                acc
            }
            Repr::Product(factors) => {
                let mut acc = Matrix::identity(ctx);
                for f in factors {
                    acc = acc.mul(&f.materialize()?);
                }
                acc
            }
            Repr::ScalarMul(s, op) => op.materialize()?.scale(s),
            Repr::Adjoint(op) => op.materialize()?.transpose(),
        })
    }

    /// Norm together with whether it is exact. Sums and products that do not
    /// materialize only yield the submultiplicative upper bound.
    pub fn norm_estimate(&self) -> (ValuationBound, bool) {
        if let Ok(m) = self.materialize() {
            return (m.norm(), true);
        }
        match &self.repr {
            Repr::IndexMap { rule, coeffs, default_coeff } => {
                let overrides = coeffs
                    .iter()
                    .filter(|(j, _)| rule.dest(**j).is_some())
                    .map(|(_, c)| c.norm())
                    .max()
                    .unwrap_or(ValuationBound::ZERO);
                (overrides.max(default_coeff.norm()), true)
            }
            Repr::Sum(terms) => {
                let bound = terms.iter().map(|t| t.norm_estimate().0).max().unwrap_or(ValuationBound::ZERO);
                (bound, false)
            }
            Repr::Product(factors) => {
                let bound = factors.iter().fold(ValuationBound::ONE, |acc, f| acc.times(f.norm_estimate().0));
                (bound, false)
            }
            Repr::ScalarMul(s, op) => {
                let (b, exact) = op.norm_estimate();
                (b.times(s.norm()), exact)
            }
            Repr::Adjoint(op) => op.norm_estimate(),
            _ => unreachable!("materializable representations handled above"),
        }
    }

    /// `max |A_ij|`; an upper bound when [`Operator::norm_estimate`] says so.
    pub fn norm(&self) -> ValuationBound {
        self.norm_estimate().0
    }

    /// Structural transpose.
    pub fn adjoint(&self) -> Operator {
        let ctx = self.ctx;
        let repr = match &self.repr {
            Repr::Finite(entries) => Repr::Finite(entries.iter().map(|((i, j), x)| ((*j, *i), x.clone())).collect()),
            Repr::Diagonal { .. } | Repr::Identity => self.repr.clone(),
            Repr::IndexMap { rule, coeffs, default_coeff } => match rule.inverse() {
                Some(inv) => {
                    let coeffs = coeffs
                        .iter()
                        .filter_map(|(j, c)| rule.dest(*j).map(|d| (d, c.clone())))
                        .collect();
                    Repr::IndexMap { rule: inv, coeffs, default_coeff: default_coeff.clone() }
                }
                None => {
                    let m = self.materialize().expect("finite index maps materialize");
                    return Operator::from_matrix(&m.transpose());
                }
            },
            Repr::Sum(terms) => Repr::Sum(terms.iter().map(Operator::adjoint).collect()),
            Repr::Product(factors) => Repr::Product(factors.iter().rev().map(Operator::adjoint).collect()),
            Repr::ScalarMul(s, op) => Repr::ScalarMul(s.clone(), Box::new(op.adjoint())),
            Repr::Adjoint(op) => return (**op).clone(),
        };
        Operator { ctx, repr }
    }

    /// Whether the matrix entries tend to zero, decided from the
    /// representation alone.
    pub fn is_compact(&self) -> Result<bool> {
        if let Ok(m) = self.materialize() {
            return Ok(m.is_compact());
        }
        match &self.repr {
            // infinitely many columns carry the nonzero default
            Repr::IndexMap { .. } => Ok(false),
            Repr::ScalarMul(s, op) => {
                if s.is_zero() {
                    Ok(true)
                } else {
                    op.is_compact()
                }
            }
            Repr::Adjoint(op) => op.is_compact(),
            Repr::Product(factors) => {
                for f in factors {
                    if let Ok(true) = f.is_compact() {
                        return Ok(true);
                    }
                }
                Err(Error::Undecidable("product of non-compact factors without a materialization"))
            }
            Repr::Sum(terms) => {
                let mut non_compact = 0;
                for t in terms {
                    if !t.is_compact()? {
                        non_compact += 1;
                    }
                }
                match non_compact {
                    0 => Ok(true),
                    1 => Ok(false),
                    _ => Err(Error::Undecidable("sum of several non-compact terms without a materialization")),
                }
            }
            _ => unreachable!("materializable representations handled above"),
        }
    }

    /// Upper-left `k x k` block of the matrix.
    pub fn truncate(&self, k: usize) -> Matrix {
        let entries: Vec<(usize, usize, Padic)> = (0..k)
            .flat_map(|j| {
                self.column(j)
                    .iter()
                    .filter(|(i, _)| *i < k)
                    .map(|(i, x)| (i, j, x.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        Matrix::from_entries(self.ctx, entries)
    }

    /// Entries outside `Z_p`, for representations that materialize or are
    /// single index maps.
    pub fn exceptional_entries(&self) -> Result<Vec<(usize, usize, Padic)>> {
        if let Ok(m) = self.materialize() {
            return Ok(m.exceptional_entries());
        }
        match &self.repr {
            Repr::IndexMap { rule, coeffs, .. } => Ok(coeffs
                .iter()
                .filter(|(_, c)| !c.is_integral())
                .filter_map(|(j, c)| rule.dest(*j).map(|d| (d, *j, c.clone())))
                .collect()),
            _ => Err(Error::NotMaterializable("exceptional set needs a materialized operator")),
        }
    }

    /// `self * other`.
    pub fn compose(&self, other: &Operator) -> Operator {
        Operator::product(self.ctx, vec![self.clone(), other.clone()])
    }

    /// `self + other`.
    pub fn plus(&self, other: &Operator) -> Operator {
        Operator::sum(self.ctx, vec![self.clone(), other.clone()])
    }

    /// Whether both operators agree on `delta_j` for all `j` in `cols`.
    pub fn agrees_on(&self, other: &Operator, cols: core::ops::Range<usize>) -> bool {
        cols.into_iter().all(|j| self.column(j) == other.column(j))
    }
}

impl From<&Matrix> for Operator {
    fn from(m: &Matrix) -> Self {
        Operator::from_matrix(m)
    }
}
