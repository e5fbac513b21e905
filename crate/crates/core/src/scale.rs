//! The scale of a finite matrix: the largest norm of its exterior powers,
//! i.e. of its minors of every size.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::dense::{self, Rows};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::operator::Operator;
use crate::padic::{Context, Padic, Valuation};

/// Largest size handled by exhaustive minor enumeration.
pub const MAX_SCALE_DIM: usize = 8;

/// The scale `p^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScaleValue {
    pub exponent: u64,
}

impl fmt::Display for ScaleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p^{}", self.exponent)
    }
}

/// `max(1, max_k |wedge^k A|)` for a square `n x n` table.
pub fn willis_scale_rows(rows: &[Vec<Padic>], ctx: Context) -> Result<ScaleValue> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("scale needs a square matrix".into()));
    }
    if n > MAX_SCALE_DIM {
        return Err(Error::InvalidInput(alloc::format!(
            "exhaustive minors are limited to size {MAX_SCALE_DIM}, got {n}"
        )));
    }
    let mut exponent = 0u64;
    for k in 1..=n {
        for (_, _, minor) in dense::minors(rows, k, ctx) {
            if let Valuation::Finite(v) = minor.valuation() {
                if v < 0 {
                    exponent = exponent.max((-v) as u64);
                }
            }
        }
    }
    Ok(ScaleValue { exponent })
}

/// Scale of the `n x n` matrix carried by `a`, which must vanish outside
/// the first `n` indices.
pub fn willis_scale_finite(a: &Matrix, n: usize) -> Result<ScaleValue> {
    if !a.tail().is_zero() || a.index_bound() > n {
        return Err(Error::PreconditionFailed(alloc::format!("matrix is not supported on the first {n} indices")));
    }
    willis_scale_rows(&a.to_rows(n), a.context())
}

/// Whether `A` and its transpose have the same scale.
pub fn scale_transpose_check(rows: &[Vec<Padic>], ctx: Context) -> Result<bool> {
    let t: Rows = dense::transpose(rows);
    Ok(willis_scale_rows(rows, ctx)? == willis_scale_rows(&t, ctx)?)
}

/// Scales of the upper-left `K x K` truncations. No limit is claimed.
pub fn scale_minor_probe(a: &Operator, bounds: &[usize]) -> Result<Vec<(usize, ScaleValue)>> {
    bounds.iter().map(|&k| Ok((k, willis_scale_finite(&a.truncate(k), k)?))).collect()
}

pub fn probe_tsv(rows: &[(usize, ScaleValue)]) -> String {
    let mut out = String::from("K\texponent\n");
    for (k, s) in rows {
        let _ = writeln!(out, "{k}\t{}", s.exponent);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{IndexRule, PairingScheme, SumRingMap};

    fn ctx() -> Context {
        Context::new(3, 30).unwrap()
    }

    #[test]
    fn diagonal_examples() {
        let c = ctx();
        assert_eq!(willis_scale_finite(&Matrix::identity(c).truncate(3), 3).unwrap().exponent, 0);
        let a = Matrix::diagonal(c, [(0, Padic::p_power(c, -1)), (1, c.int(3)), (2, c.one())], c.zero());
        assert_eq!(willis_scale_finite(&a, 3).unwrap().exponent, 1);
        let b = Matrix::diagonal(c, [(0, Padic::p_power(c, -2)), (1, Padic::p_power(c, -1))], c.zero());
        assert_eq!(willis_scale_finite(&b, 2).unwrap().to_string(), "p^3");
    }

    #[test]
    fn refuses_large_or_unsupported() {
        let c = ctx();
        assert!(willis_scale_finite(&Matrix::identity(c).truncate(9), 9).is_err());
        assert!(willis_scale_finite(&Matrix::identity(c), 3).is_err());
    }

    #[test]
    fn transpose_and_integral() {
        let c = ctx();
        let rows = alloc::vec![
            alloc::vec![c.zero(), c.int(5), c.int(7)],
            alloc::vec![c.zero(), c.zero(), c.int(2)],
            alloc::vec![c.zero(), c.zero(), c.zero()],
        ];
        assert!(scale_transpose_check(&rows, c).unwrap());
        assert_eq!(willis_scale_rows(&rows, c).unwrap().exponent, 0);
    }

    #[test]
    fn probes() {
        let c = ctx();
        let one = scale_minor_probe(&Operator::identity(c), &[1, 2, 4]).unwrap();
        assert!(one.iter().all(|(_, s)| s.exponent == 0));
        let shift = Operator::permutation_like(c, IndexRule::SumRing(SumRingMap::Beta1, PairingScheme::Cantor));
        assert!(scale_minor_probe(&shift, &[2, 5, 8]).unwrap().iter().all(|(_, s)| s.exponent == 0));
        let d = Operator::diagonal(c, [(0, Padic::p_power(c, -1))], c.one()).unwrap();
        let probe = scale_minor_probe(&d, &[1, 3, 6]).unwrap();
        assert!(probe.iter().all(|(_, s)| s.exponent == 1));
        assert_eq!(probe_tsv(&probe), "K\texponent\n1\t1\n3\t1\n6\t1\n");
    }
}
