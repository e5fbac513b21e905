#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use padic_opalg_core::{Context, Matrix, Padic};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;
pub type QMat = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_identity(n: usize) -> QMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

pub fn q_diag(values: &[Q]) -> QMat {
    let n = values.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { values[i].clone() } else { Q::zero() }).collect()).collect()
}

pub fn q_mul(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).fold(Q::zero(), |acc, k| acc + &a[i][k] * &b[k][j])).collect())
        .collect()
}

pub fn q_sub(a: &QMat, b: &QMat) -> QMat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

/// Reduced row echelon rank.
pub fn q_rank(a: &QMat) -> usize {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, r);
        let pivot = m[rank][c].clone();
        for r2 in 0..rows {
            if r2 != rank && !m[r2][c].is_zero() {
                let f = &m[r2][c] / &pivot;
                for k in 0..cols {
                    let sub = &f * &m[rank][k];
                    m[r2][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn q_det(a: &QMat) -> Q {
    let mut m = a.clone();
    let n = m.len();
    let mut det = Q::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !m[r][c].is_zero()) else { return Q::zero() };
        if r != c {
            m.swap(r, c);
            det = -det;
        }
        det *= &m[c][c];
        for r2 in c + 1..n {
            let f = &m[r2][c] / &m[c][c];
            for k in c..n {
                let sub = &f * &m[c][k];
                m[r2][k] -= sub;
            }
        }
    }
    det
}

pub fn q_inverse(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let mut m: QMat = a.iter().zip(q_identity(n)).map(|(r, e)| r.iter().cloned().chain(e).collect()).collect();
    for c in 0..n {
        let r = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(r, c);
        let pivot = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &pivot;
        }
        for r2 in 0..n {
            if r2 != c && !m[r2][c].is_zero() {
                let f = m[r2][c].clone();
                for k in 0..2 * n {
                    let sub = &f * &m[c][k];
                    m[r2][k] -= sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn p_valuation_int(n: &BigInt, p: u32) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    Some(v)
}

/// `v_p` of a nonzero rational.
pub fn q_valuation(x: &Q, p: u32) -> Option<i64> {
    let num = p_valuation_int(x.numer(), p)?;
    let den = p_valuation_int(x.denom(), p).unwrap_or(0);
    Some(num as i64 - den as i64)
}

pub fn to_padic(ctx: Context, x: &Q) -> Padic {
    Padic::from_bigint(ctx, x.numer()).div(&Padic::from_bigint(ctx, x.denom())).expect("nonzero denominator")
}

pub fn to_matrix(ctx: Context, a: &QMat) -> Matrix {
    let rows: Vec<Vec<Padic>> = a.iter().map(|r| r.iter().map(|x| to_padic(ctx, x)).collect()).collect();
    Matrix::from_rows(ctx, &rows)
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> QMat {
    (0..n).map(|_| (0..n).map(|_| q(rng.gen_range(-bound..=bound))).collect()).collect()
}

/// Integer matrix whose determinant is a `p`-adic unit, so it and its
/// inverse have entries in `Z_p`.
pub fn random_unit_matrix(rng: &mut ChaCha8Rng, n: usize, p: u32) -> QMat {
    loop {
        let m = random_int_matrix(rng, n, 3);
        let d = q_det(&m);
        if !d.is_zero() && q_valuation(&d, p) == Some(0) {
            return m;
        }
    }
}

/// Integer matrix with nonzero determinant.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> QMat {
    loop {
        let m = random_int_matrix(rng, n, 3);
        if !q_det(&m).is_zero() {
            return m;
        }
    }
}

/// `u diag(1^r, 0^(n-r)) u^-1`.
pub fn conjugated_projection(u: &QMat, r: usize) -> QMat {
    let n = u.len();
    let d = q_diag(&(0..n).map(|i| if i < r { Q::one() } else { Q::zero() }).collect::<Vec<_>>());
    q_mul(&q_mul(u, &d), &q_inverse(u).expect("invertible"))
}

/// A random element of `Z_p` known to `digits` digits.
pub fn random_zp(rng: &mut ChaCha8Rng, ctx: Context, digits: u32) -> Padic {
    let p = BigUint::from(ctx.prime());
    let mut x = BigUint::zero();
    for _ in 0..digits {
        x = x * &p + BigUint::from(rng.gen_range(0..ctx.prime()));
    }
    Padic::from_biguint(ctx, &x)
}
