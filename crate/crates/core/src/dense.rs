//! Dense linear algebra over `Q_p`: determinants, rank, inverses and minors.
//!
//! Elimination always pivots on an entry of maximal norm, ties going to the
//! smallest row and then the smallest column, so no step divides by a
//! number smaller than what it eliminates.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::padic::{Context, Padic, Valuation};

pub type Rows = Vec<Vec<Padic>>;

pub fn identity_rows(ctx: Context, n: usize) -> Rows {
    (0..n).map(|i| (0..n).map(|j| if i == j { ctx.one() } else { ctx.zero() }).collect()).collect()
}

pub fn transpose(rows: &[Vec<Padic>]) -> Rows {
    let cols = rows.first().map_or(0, Vec::len);
    (0..cols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mul(a: &[Vec<Padic>], b: &[Vec<Padic>], ctx: Context) -> Rows {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(ctx.zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn is_negligible(x: &Padic, threshold: Option<i64>) -> bool {
    match threshold {
        Some(t) => x.valuation().at_least(t),
        None => x.is_zero(),
    }
}

/// Position of a maximal-norm entry among rows and columns `>= from`.
fn pivot(rows: &[Vec<Padic>], from_row: usize, from_col: usize, threshold: Option<i64>) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, Valuation)> = None;
    for (i, row) in rows.iter().enumerate().skip(from_row) {
        for (j, x) in row.iter().enumerate().skip(from_col) {
            if is_negligible(x, threshold) {
                continue;
            }
            let v = x.valuation();
            if best.as_ref().is_none_or(|b| v < b.2) {
                best = Some((i, j, v));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Rank by full-pivot elimination. With a threshold, entries of valuation
/// at least `threshold` count as zero.
pub fn rank_within(rows: &[Vec<Padic>], threshold: Option<i64>) -> usize {
    let mut m: Rows = rows.to_vec();
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    while r < n_rows.min(n_cols) {
        let Some((pi, pj)) = pivot(&m, r, r, threshold) else { break };
        m.swap(r, pi);
        for row in m.iter_mut() {
            row.swap(r, pj);
        }
        let inv = m[r][r].inverse().expect("pivot is nonzero");
        for i in r + 1..n_rows {
            if m[i][r].is_zero() {
                continue;
            }
            let factor = &m[i][r] * &inv;
            for j in r..n_cols {
                let t = &factor * &m[r][j];
                m[i][j] = &m[i][j] - &t;
            }
        }
        r += 1;
    }
    r
}

pub fn rank(rows: &[Vec<Padic>]) -> usize {
    rank_within(rows, None)
}

/// Determinant; cofactor expansion up to 4x4, pivoted elimination above.
pub fn det(rows: &[Vec<Padic>], ctx: Context) -> Padic {
    let n = rows.len();
    match n {
        0 => ctx.one(),
        1 => rows[0][0].clone(),
        2..=4 => cofactor_det(rows, ctx),
        _ => elimination_det(rows, ctx),
    }
}

fn cofactor_det(rows: &[Vec<Padic>], ctx: Context) -> Padic {
    let n = rows.len();
    if n == 1 {
        return rows[0][0].clone();
    }
    if n == 2 {
        return &rows[0][0] * &rows[1][1] - &rows[0][1] * &rows[1][0];
    }
    let mut acc = ctx.zero();
    for j in 0..n {
        if rows[0][j].is_zero() {
            continue;
        }
        let minor: Rows = rows[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &rows[0][j] * &cofactor_det(&minor, ctx);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn elimination_det(rows: &[Vec<Padic>], ctx: Context) -> Padic {
    let n = rows.len();
    let mut m: Rows = rows.to_vec();
    let mut acc = ctx.one();
    for r in 0..n {
        let Some((pi, pj)) = pivot(&m, r, r, None) else { return ctx.zero() };
        if pi != r {
            m.swap(r, pi);
            acc = -acc;
        }
        if pj != r {
            for row in m.iter_mut() {
                row.swap(r, pj);
            }
            acc = -acc;
        }
        acc = &acc * &m[r][r];
        let inv = m[r][r].inverse().expect("pivot is nonzero");
        for i in r + 1..n {
            if m[i][r].is_zero() {
                continue;
            }
            let factor = &m[i][r] * &inv;
            for j in r..n {
                let t = &factor * &m[r][j];
                m[i][j] = &m[i][j] - &t;
            }
        }
    }
    acc
}

/// Gauss-Jordan inverse of a square matrix.
pub fn inverse(rows: &[Vec<Padic>], ctx: Context) -> Result<Rows> {
    let n = rows.len();
    let mut m: Rows = rows.to_vec();
    let mut inv = identity_rows(ctx, n);
    for c in 0..n {
        let mut best: Option<(usize, Valuation)> = None;
        for (i, row) in m.iter().enumerate().skip(c) {
            let v = row[c].valuation();
            if !row[c].is_zero() && best.is_none_or(|b| v < b.1) {
                best = Some((i, v));
            }
        }
        let Some((pi, _)) = best else {
            return Err(Error::PreconditionFailed("matrix is singular".into()));
        };
        m.swap(c, pi);
        inv.swap(c, pi);
        let pinv = m[c][c].inverse()?;
        for j in 0..n {
            m[c][j] = &m[c][j] * &pinv;
            inv[c][j] = &inv[c][j] * &pinv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            for j in 0..n {
                let a = &factor * &m[c][j];
                m[i][j] = &m[i][j] - &a;
                let b = &factor * &inv[c][j];
                inv[i][j] = &inv[i][j] - &b;
            }
        }
    }
    Ok(inv)
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { return out };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every `k x k` minor, keyed by (row subset, column subset).
pub fn minors(rows: &[Vec<Padic>], k: usize, ctx: Context) -> Vec<(Vec<usize>, Vec<usize>, Padic)> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let row_sets = combinations(n_rows, k);
    let col_sets = combinations(n_cols, k);
    let mut out = Vec::with_capacity(row_sets.len() * col_sets.len());
    for rs in &row_sets {
        for cs in &col_sets {
            let sub: Rows = rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect()).collect();
            out.push((rs.clone(), cs.clone(), det(&sub, ctx)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(5, 20).unwrap()
    }

    fn rows(c: Context, xs: &[&[i64]]) -> Rows {
        xs.iter().map(|r| r.iter().map(|&x| c.int(x)).collect()).collect()
    }

    #[test]
    fn determinants_agree_across_methods() {
        let c = ctx();
        let m = rows(c, &[&[2, 1, 0, 3, 1], &[0, 5, 1, 1, 2], &[7, 0, 3, 2, 2], &[1, 1, 1, 1, 0], &[4, 0, 2, 0, 9]]);
        let e = elimination_det(&m, c);
        let f = cofactor_det(&m, c);
        assert_eq!(e, f);
        assert_eq!(det(&rows(c, &[&[1, 2], &[3, 4]]), c), c.int(-2));
    }

    #[test]
    fn rank_of_dependent_rows() {
        let c = ctx();
        let m = rows(c, &[&[1, 2, 3], &[2, 4, 6], &[0, 5, 25]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&rows(c, &[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn inverse_round_trip() {
        let c = ctx();
        let m = rows(c, &[&[5, 1, 0], &[2, 10, 1], &[0, 3, 1]]);
        let inv = inverse(&m, c).unwrap();
        assert_eq!(mul(&m, &inv, c), identity_rows(c, 3));
        assert!(inverse(&rows(c, &[&[1, 2], &[2, 4]]), c).is_err());
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), alloc::vec![Vec::<usize>::new()]);
        assert_eq!(combinations(2, 3).len(), 0);
        assert_eq!(minors(&rows(ctx(), &[&[1, 2], &[3, 4]]), 1, ctx()).len(), 4);
    }
}
