//! Infinite matrices of the form "constant diagonal tail plus finitely many
//! explicit entries".
//!
//! This class contains the identity, every finite matrix and every diagonal
//! operator with a constant tail, and it is closed under sums, products,
//! scalar multiples and transposes. Norms and compactness are decided
//! exactly: the tail value sits at infinitely many positions, so the
//! operator is compact iff the tail is zero.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::padic::{Context, Padic, ValuationBound};
use crate::poly::PadicPolynomial;
use crate::vector::PadicVector;

#[derive(Clone, Debug)]
pub struct Matrix {
    ctx: Context,
    tail: Padic,
    entries: BTreeMap<(usize, usize), Padic>,
}

impl Matrix {
    pub fn zero(ctx: Context) -> Self {
        Matrix { ctx, tail: Padic::zero(ctx), entries: BTreeMap::new() }
    }

    pub fn identity(ctx: Context) -> Self {
        Matrix::scalar(ctx, Padic::one(ctx))
    }

    /// `s` times the identity.
    pub fn scalar(ctx: Context, s: Padic) -> Self {
        Matrix { ctx, tail: s, entries: BTreeMap::new() }
    }

    /// Finite matrix from `(row, col, value)` triples; repeated positions add up.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize, Padic)>>(ctx: Context, entries: I) -> Self {
        Matrix::with_tail(ctx, Padic::zero(ctx), entries)
    }

    pub fn with_tail<I: IntoIterator<Item = (usize, usize, Padic)>>(ctx: Context, tail: Padic, entries: I) -> Self {
        let mut map: BTreeMap<(usize, usize), Padic> = BTreeMap::new();
        for (i, j, x) in entries {
            match map.get_mut(&(i, j)) {
                Some(cur) => *cur = &*cur + &x,
                None => {
                    map.insert((i, j), x);
                }
            }
        }
        let mut m = Matrix { ctx, tail, entries: map };
        m.normalize();
        m
    }

    /// Diagonal operator with explicit entries and a constant tail.
    pub fn diagonal<I: IntoIterator<Item = (usize, Padic)>>(ctx: Context, entries: I, tail: Padic) -> Self {
        Matrix::with_tail(ctx, tail, entries.into_iter().map(|(i, x)| (i, i, x)))
    }

    /// Dense square block placed at indices `0..n`.
    pub fn from_rows(ctx: Context, rows: &[Vec<Padic>]) -> Self {
        Matrix::from_entries(
            ctx,
            rows.iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, x)| (i, j, x.clone()))),
        )
    }

    fn normalize(&mut self) {
        let tail = &self.tail;
        self.entries.retain(|(i, j), x| {
            if i == j {
                x != tail
            } else {
                !x.is_zero()
            }
        });
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    /// The diagonal value at all indices without an explicit entry.
    pub fn tail(&self) -> &Padic {
        &self.tail
    }

    /// Explicit entries, i.e. those differing from the implicit value.
    pub fn explicit(&self) -> impl Iterator<Item = ((usize, usize), &Padic)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn entry(&self, i: usize, j: usize) -> Padic {
        match self.entries.get(&(i, j)) {
            Some(x) => x.clone(),
            None if i == j => self.tail.clone(),
            None => Padic::zero(self.ctx),
        }
    }

    /// Every index touched by an explicit entry.
    pub fn support_indices(&self) -> BTreeSet<usize> {
        self.entries.keys().flat_map(|&(i, j)| [i, j]).collect()
    }

    /// Finite support: no tail.
    pub fn is_finite(&self) -> bool {
        self.tail.is_zero()
    }

    /// Smallest `n` such that all explicit entries lie in `0..n`.
    pub fn index_bound(&self) -> usize {
        self.support_indices().last().map_or(0, |m| m + 1)
    }

    /// Exact operator norm: the maximal entry norm.
    pub fn norm(&self) -> ValuationBound {
        self.entries
            .values()
            .map(Padic::norm)
            .chain(core::iter::once(self.tail.norm()))
            .max()
            .unwrap_or(ValuationBound::ZERO)
    }

    /// Entries converge to zero exactly when the tail vanishes.
    pub fn is_compact(&self) -> bool {
        self.tail.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.tail.is_zero() && self.entries.is_empty()
    }

    pub fn approx_eq(&self, other: &Matrix) -> bool {
        self.sub(other).is_zero()
    }

    pub fn column(&self, j: usize) -> PadicVector {
        let mut v = PadicVector::from_entries(
            self.entries.iter().filter(|((_, c), _)| *c == j).map(|((r, _), x)| (*r, x.clone())),
        );
        if !self.entries.contains_key(&(j, j)) {
            v.set(j, self.tail.clone());
        }
        v
    }

    pub fn row(&self, i: usize) -> PadicVector {
        let mut v = PadicVector::from_entries(
            self.entries.range((i, 0)..=(i, usize::MAX)).map(|((_, c), x)| (*c, x.clone())),
        );
        if !self.entries.contains_key(&(i, i)) {
            v.set(i, self.tail.clone());
        }
        v
    }

    pub fn apply(&self, xi: &PadicVector) -> PadicVector {
        let mut out = PadicVector::zero();
        for (j, x) in xi.iter() {
            out.add_assign_scaled(&self.column(j), Some(x));
        }
        out
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&Padic, &Padic) -> Padic) -> Matrix {
        let keys: BTreeSet<(usize, usize)> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        let mut entries = BTreeMap::new();
        for (i, j) in keys {
            entries.insert((i, j), f(&self.entry(i, j), &other.entry(i, j)));
        }
        let mut m = Matrix { ctx: self.ctx, tail: f(&self.tail, &other.tail), entries };
        m.normalize();
        m
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&Padic::from_i64(self.ctx, -1))
    }

    pub fn scale(&self, s: &Padic) -> Matrix {
        let mut m = Matrix {
            ctx: self.ctx,
            tail: &self.tail * s,
            entries: self.entries.iter().map(|(k, x)| (*k, x * s)).collect(),
        };
        m.normalize();
        m
    }

    /// `self + s * I`.
    pub fn add_scalar(&self, s: &Padic) -> Matrix {
        self.add(&Matrix::scalar(self.ctx, s.clone()))
    }

    /// Explicit entries plus the implicit diagonal at the given indices,
    /// grouped by row.
    fn rows_on(&self, indices: &BTreeSet<usize>) -> BTreeMap<usize, Vec<(usize, Padic)>> {
        let mut rows: BTreeMap<usize, Vec<(usize, Padic)>> = BTreeMap::new();
        for ((i, j), x) in &self.entries {
            rows.entry(*i).or_default().push((*j, x.clone()));
        }
        if !self.tail.is_zero() {
            for &i in indices {
                if !self.entries.contains_key(&(i, i)) {
                    rows.entry(i).or_default().push((i, self.tail.clone()));
                }
            }
        }
        rows
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let mut support = self.support_indices();
        support.extend(other.support_indices());
        let left = self.rows_on(&support);
        let right = other.rows_on(&support);
        let mut acc: BTreeMap<(usize, usize), Padic> = BTreeMap::new();
        for (i, row) in &left {
            for (k, a) in row {
                let Some(brow) = right.get(k) else { continue };
                for (j, b) in brow {
                    let term = a * b;
                    match acc.get_mut(&(*i, *j)) {
                        Some(cur) => *cur = &*cur + &term,
                        None => {
                            acc.insert((*i, *j), term);
                        }
                    }
                }
            }
        }
        // diagonal positions inside the support no longer carry the tail
        for &i in &support {
            acc.entry((i, i)).or_insert_with(|| Padic::zero(self.ctx));
        }
        let mut m = Matrix { ctx: self.ctx, tail: &self.tail * &other.tail, entries: acc };
        m.normalize();
        m
    }

    pub fn pow(&self, e: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.ctx);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn transpose(&self) -> Matrix {
        Matrix {
            ctx: self.ctx,
            tail: self.tail.clone(),
            entries: self.entries.iter().map(|((i, j), x)| ((*j, *i), x.clone())).collect(),
        }
    }

    /// Upper-left `k x k` block as a finite matrix.
    pub fn truncate(&self, k: usize) -> Matrix {
        let mut entries: Vec<(usize, usize, Padic)> = self
            .entries
            .iter()
            .filter(|((i, j), _)| *i < k && *j < k)
            .map(|((i, j), x)| (*i, *j, x.clone()))
            .collect();
        if !self.tail.is_zero() {
            for i in 0..k {
                if !self.entries.contains_key(&(i, i)) {
                    entries.push((i, i, self.tail.clone()));
                }
            }
        }
        Matrix::from_entries(self.ctx, entries)
    }

    /// Dense `n x n` upper-left block.
    pub fn to_rows(&self, n: usize) -> Vec<Vec<Padic>> {
        (0..n).map(|i| (0..n).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// `c_0 + c_1 A + ... + c_d A^d` by Horner's rule.
    pub fn eval_poly(&self, poly: &PadicPolynomial) -> Matrix {
        let mut acc = Matrix::zero(self.ctx);
        for c in poly.coefficients().iter().rev() {
            acc = acc.mul(self).add_scalar(c);
        }
        acc
    }

    /// Largest absolute precision among nonzero entries; terms of higher
    /// valuation no longer change any entry.
    pub fn max_absolute_precision(&self) -> Option<i64> {
        self.entries
            .values()
            .chain(core::iter::once(&self.tail))
            .filter_map(Padic::absolute_precision)
            .max()
    }

    /// Only diagonal positions carry explicit entries.
    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|(i, j)| i == j)
    }

    /// `|A^2 - A| <= p^-target`.
    pub fn is_idempotent_within(&self, target: i64) -> bool {
        self.mul(self).sub(self).norm().within(target)
    }

    /// Columns carrying an entry outside `Z_p`.
    pub fn exceptional_columns(&self) -> BTreeSet<usize> {
        self.entries.iter().filter(|(_, x)| !x.is_integral()).map(|((_, j), _)| *j).collect()
    }

    /// Entries outside `Z_p`.
    pub fn exceptional_entries(&self) -> Vec<(usize, usize, Padic)> {
        self.entries
            .iter()
            .filter(|(_, x)| !x.is_integral())
            .map(|((i, j), x)| (*i, *j, x.clone()))
            .collect()
    }
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Matrix) -> bool {
        self.approx_eq(other)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tail {}; ", self.tail)?;
        for (k, ((i, j), x)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({i},{j}) {x}")?;
        }
        Ok(())
    }
}
