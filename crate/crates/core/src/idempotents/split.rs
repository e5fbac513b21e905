//! Splitting an idempotent into a finite-rank part and a contractive part,
//! and reading off the rank of finite-rank idempotents.

use alloc::vec::Vec;

use crate::dense::{self, Rows};
use crate::error::{Error, Result};
use crate::idempotents::refine::{idempotent_refine, norm_valuation};
use crate::matrix::Matrix;
use crate::padic::{Context, Padic, Valuation};
use crate::vector::PadicVector;

/// Normalized basis `v_k` with pivots `a_k` such that `v_i(a_k) = delta_ik`
/// and `|v_k| = 1`, and the projection `xi -> sum_k xi(a_k) v_k`.
#[derive(Clone, Debug)]
pub struct ColumnProjection {
    pub vectors: Vec<PadicVector>,
    pub pivots: Vec<usize>,
    pub projection: Matrix,
}

/// Position of a maximal-norm entry, ties to the smallest index.
fn pivot_index(v: &PadicVector) -> Option<usize> {
    let mut best: Option<(usize, Valuation)> = None;
    for (i, x) in v.iter() {
        if best.is_none_or(|(_, b)| x.valuation() < b) {
            best = Some((i, x.valuation()));
        }
    }
    best.map(|(i, _)| i)
}

/// Echelon reduction of `input`. A residual counts as zero once it is
/// `p^-threshold` times smaller than the vector it came from. Dependent
/// vectors are skipped or reported.
fn reduce(
    input: &[PadicVector],
    threshold: Option<i64>,
    skip_dependent: bool,
) -> Result<(Vec<PadicVector>, Vec<usize>, Vec<usize>)> {
    let mut vectors: Vec<PadicVector> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut kept = Vec::new();
    for (index, original) in input.iter().enumerate() {
        let mut w = original.clone();
        for (v, &a) in vectors.iter().zip(&pivots) {
            if let Some(c) = w.get(a).cloned() {
                w.add_assign_scaled(v, Some(&-c));
            }
        }
        let negligible = w.is_zero()
            || match (threshold, original.norm().exponent.finite()) {
                (Some(t), Some(v0)) => w.norm().within(v0 + t),
                _ => false,
            };
        if negligible {
            if skip_dependent {
                continue;
            }
            return Err(Error::DependentBasis { index });
        }
        let a = pivot_index(&w).expect("nonzero vector has a pivot");
        let inv = w.get(a).expect("pivot entry").inverse()?;
        let w = w.scale(&inv);
        for v in vectors.iter_mut() {
            if let Some(c) = v.get(a).cloned() {
                v.add_assign_scaled(&w, Some(&-c));
            }
        }
        vectors.push(w);
        pivots.push(a);
        kept.push(index);
    }
    Ok((vectors, pivots, kept))
}

fn projection_matrix(ctx: Context, vectors: &[PadicVector], pivots: &[usize]) -> Matrix {
    Matrix::from_entries(
        ctx,
        vectors.iter().zip(pivots).flat_map(|(v, &a)| v.iter().map(move |(r, x)| (r, a, x.clone()))),
    )
}

/// Contractive idempotent onto the span of `basis`, which must lie in the
/// image of `ambient` and be linearly independent.
pub fn column_projection(basis: &[PadicVector], ambient: &Matrix, target: i64) -> Result<ColumnProjection> {
    let ctx = ambient.context();
    for (k, v) in basis.iter().enumerate() {
        let defect = ambient.apply(v).sub(v);
        let scale = v.norm().exponent.finite().unwrap_or(0);
        if !defect.norm().within(scale + target) {
            return Err(Error::PreconditionFailed(alloc::format!(
                "basis vector {k} is not in the image of the ambient idempotent"
            )));
        }
    }
    let (vectors, pivots, _) = reduce(basis, Some(target), false)?;
    let projection = projection_matrix(ctx, &vectors, &pivots);
    Ok(ColumnProjection { vectors, pivots, projection })
}

/// `e = f + g` with `f` of finite rank and `|g| <= 1`.
#[derive(Clone, Debug)]
pub struct SplitResult {
    pub f: Matrix,
    pub g: Matrix,
    /// Largest column with an entry outside `Z_p`.
    pub n: Option<usize>,
    /// Columns of `e` kept as a basis of `im f`.
    pub spanning_columns: Vec<usize>,
    pub projection: Option<ColumnProjection>,
}

impl SplitResult {
    /// Named checks of every claimed property, each to `p^-target`.
    pub fn checks(&self, e: &Matrix, target: i64) -> Vec<(&'static str, bool)> {
        let small = |m: Matrix| m.norm().within(target);
        alloc::vec![
            ("f + g = e", small(self.f.add(&self.g).sub(e))),
            ("f^2 = f", small(self.f.mul(&self.f).sub(&self.f))),
            ("g^2 = g", small(self.g.mul(&self.g).sub(&self.g))),
            ("fg = 0", small(self.f.mul(&self.g))),
            ("gf = 0", small(self.g.mul(&self.f))),
            ("fe = f", small(self.f.mul(e).sub(&self.f))),
            ("ef = f", small(e.mul(&self.f).sub(&self.f))),
            ("|g| <= 1", self.g.norm().is_contractive()),
            ("f has finite rank", self.f.is_finite()),
        ]
    }

    pub fn is_valid(&self, e: &Matrix, target: i64) -> bool {
        self.checks(e, target).iter().all(|(_, ok)| *ok)
    }
}

/// Splits off the span of the columns `0..=n`, where `n` is the last column
/// with an entry outside `Z_p`. Dependent spanning columns are dropped.
pub fn idempotent_split(e: &Matrix, target: i64) -> Result<SplitResult> {
    let ctx = e.context();
    if !e.is_idempotent_within(target) {
        return Err(Error::PreconditionFailed("split needs an idempotent".into()));
    }
    let Some(&n) = e.exceptional_columns().last() else {
        return Ok(SplitResult {
            f: Matrix::zero(ctx),
            g: e.clone(),
            n: None,
            spanning_columns: Vec::new(),
            projection: None,
        });
    };
    let columns: Vec<PadicVector> = (0..=n).map(|j| e.column(j)).collect();
    let (vectors, pivots, kept) = reduce(&columns, Some(target), true)?;
    let projection = projection_matrix(ctx, &vectors, &pivots);
    let f = projection.mul(e);
    let g = e.sub(&f);
    Ok(SplitResult {
        f,
        g,
        n: Some(n),
        spanning_columns: kept,
        projection: Some(ColumnProjection { vectors, pivots, projection }),
    })
}

/// Rank of a finite-rank idempotent with the change of basis bringing it to
/// `diag(1, ..., 1, 0, ..., 0)`.
#[derive(Clone, Debug)]
pub struct RankReport {
    pub rank: usize,
    /// Indices carrying the finite block; local coordinates follow this order.
    pub support: Vec<usize>,
    pub refined: Matrix,
    /// `D = B^-1 e B` in local coordinates.
    pub diagonal_form: Matrix,
    /// Columns: image basis then kernel basis, in local coordinates.
    pub basis_change: Matrix,
    pub basis_change_inv: Matrix,
}

fn local_block(m: &Matrix, support: &[usize]) -> Rows {
    support.iter().map(|&i| support.iter().map(|&j| m.entry(i, j)).collect()).collect()
}

/// Refines a finitely supported approximant, then reads off the rank and a
/// diagonal form. The rank is the class of `f` in `K_0` of the compacts.
pub fn finite_rank_reduce(f: &Matrix, target: i64, max_m: u64) -> Result<RankReport> {
    let ctx = f.context();
    if !f.is_compact() {
        return Err(Error::PreconditionFailed("finite-rank reduction needs a compact idempotent".into()));
    }
    if f.is_zero() {
        return Ok(RankReport {
            rank: 0,
            support: Vec::new(),
            refined: f.clone(),
            diagonal_form: Matrix::zero(ctx),
            basis_change: Matrix::zero(ctx),
            basis_change_inv: Matrix::zero(ctx),
        });
    }
    if !f.is_idempotent_within(target) {
        return Err(Error::PreconditionFailed(alloc::format!(
            "not idempotent: valuation of f^2 - f is {}",
            norm_valuation(&f.mul(f).sub(f))
        )));
    }
    // f is already finitely supported, so it is its own approximant
    let refined = idempotent_refine(f, target, max_m)?.value;
    let support: Vec<usize> = refined.support_indices().into_iter().collect();
    let n = support.len();
    let block = local_block(&refined, &support);
    let rank = dense::rank_within(&block, Some(target));
    let local_e = Matrix::from_rows(ctx, &block);
    let complement = Matrix::identity(ctx).truncate(n).sub(&local_e);
    let image_cols: Vec<PadicVector> = (0..n).map(|j| local_e.column(j)).collect();
    let kernel_cols: Vec<PadicVector> = (0..n).map(|j| complement.column(j)).collect();
    let (_, _, image_kept) = reduce(&image_cols, Some(target), true)?;
    let (_, _, kernel_kept) = reduce(&kernel_cols, Some(target), true)?;
    if image_kept.len() != rank || kernel_kept.len() != n - rank {
        return Err(Error::PreconditionFailed(alloc::format!(
            "image and kernel dimensions {} + {} do not add up to {n}",
            image_kept.len(),
            kernel_kept.len()
        )));
    }
    let basis: Vec<&PadicVector> =
        image_kept.iter().map(|&j| &image_cols[j]).chain(kernel_kept.iter().map(|&j| &kernel_cols[j])).collect();
    let b_rows: Rows = (0..n).map(|i| basis.iter().map(|v| v.get_or_zero(i, ctx)).collect()).collect();
    let b_inv = dense::inverse(&b_rows, ctx)?;
    let basis_change = Matrix::from_rows(ctx, &b_rows);
    let basis_change_inv = Matrix::from_rows(ctx, &b_inv);
    let diagonal_form = basis_change_inv.mul(&local_e).mul(&basis_change);
    Ok(RankReport { rank, support, refined, diagonal_form, basis_change, basis_change_inv })
}

impl RankReport {
    /// `D` equals `diag(1^rank, 0)` to `p^-target`.
    pub fn diagonal_form_is_standard(&self, target: i64) -> bool {
        let ctx = self.diagonal_form.context();
        let standard = Matrix::diagonal(ctx, (0..self.rank).map(|i| (i, Padic::one(ctx))), ctx.zero());
        self.diagonal_form.sub(&standard).norm().within(target)
    }
}
