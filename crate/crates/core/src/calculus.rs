//! Mahler functional calculus for normal contractions.
//!
//! `A` is a normal contraction when every `binom(A, n)` has norm at most 1,
//! i.e. `|A(A-1)...(A-(n-1))| <= p^-v_p(n!)`. Finite data only certifies
//! this up to a depth, except for contractive diagonals, which always
//! qualify.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::combinatorics::{binomial_padic, factorial, factorial_valuation};
use crate::error::{Error, Result};
use crate::mahler::MahlerFunction;
use crate::matrix::Matrix;
use crate::padic::{Context, Padic, Valuation, ValuationBound};
use crate::poly::PadicPolynomial;

#[derive(Clone, Debug)]
pub struct ContractionCertificate {
    operator: Matrix,
    depth: usize,
    /// `(n, valuation of |A(A-1)...(A-(n-1))|)` for `1 <= n <= depth`.
    checked: Vec<(usize, Valuation)>,
    /// Contractive diagonal: every depth holds.
    structural: bool,
    binomials: Vec<Matrix>,
}

impl ContractionCertificate {
    pub fn operator(&self) -> &Matrix {
        &self.operator
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn checked(&self) -> &[(usize, Valuation)] {
        &self.checked
    }

    pub fn is_structural(&self) -> bool {
        self.structural
    }

    pub fn covers(&self, n: usize) -> bool {
        self.structural || n <= self.depth
    }
}

fn is_contractive_diagonal(a: &Matrix) -> bool {
    a.is_diagonal() && a.norm().is_contractive()
}

/// Checks `|A(A-1)...(A-(n-1))| <= p^-v_p(n!)` for `n <= depth`.
pub fn certify_normal_contraction(a: &Matrix, depth: usize) -> Result<ContractionCertificate> {
    let ctx = a.context();
    let p = ctx.prime();
    let mut falling = Matrix::identity(ctx);
    let mut checked = Vec::with_capacity(depth);
    let mut binomials = alloc::vec![Matrix::identity(ctx)];
    for n in 1..=depth {
        falling = falling.mul(&a.add_scalar(&ctx.int(-(n as i64 - 1))));
        let achieved = falling.norm().exponent;
        let required = factorial_valuation(n as u64, p) as i64;
        if !achieved.at_least(required) {
            return Err(Error::CertificationFailed { n, achieved, required });
        }
        checked.push((n, achieved));
        let inv = Padic::from_biguint(ctx, &factorial(n as u64)).inverse()?;
        binomials.push(falling.scale(&inv));
    }
    Ok(ContractionCertificate {
        operator: a.clone(),
        depth,
        checked,
        structural: is_contractive_diagonal(a),
        binomials,
    })
}

/// `binom(A, n) = A(A-1)...(A-(n-1))/n!`.
pub fn binom_operator(cert: &ContractionCertificate, n: usize) -> Result<Matrix> {
    if let Some(b) = cert.binomials.get(n) {
        return Ok(b.clone());
    }
    if !cert.structural {
        return Err(Error::PreconditionFailed(alloc::format!(
            "certificate depth {} does not cover n = {n}",
            cert.depth
        )));
    }
    let a = &cert.operator;
    let entries = a
        .explicit()
        .map(|((i, _), x)| binomial_padic(x, n as u64).map(|b| (i, b)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::diagonal(a.context(), entries, binomial_padic(a.tail(), n as u64)?))
}

/// A truncated series together with the norm bound on what was dropped.
#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: Matrix,
    pub error_bound: ValuationBound,
}

/// `pi_A(f) = sum_n T_n binom(A, n)` over the listed coefficients.
pub fn functional_calculus(cert: &ContractionCertificate, f: &MahlerFunction) -> Result<SeriesValue> {
    let ctx = cert.operator.context();
    if !f.is_empty() && !cert.covers(f.len() - 1) {
        return Err(Error::PreconditionFailed(alloc::format!(
            "certificate depth {} is below the {} listed Mahler coefficients",
            cert.depth,
            f.len()
        )));
    }
    let mut acc = Matrix::zero(ctx);
    for (n, t) in f.coefficients().iter().enumerate() {
        if t.is_zero() {
            continue;
        }
        acc = acc.add(&binom_operator(cert, n)?.scale(t));
    }
    Ok(SeriesValue { value: acc, error_bound: f.tail_bound() })
}

/// Result of [`f_z_series`]; carries the certificate re-derived for `A - 1`.
#[derive(Clone, Debug)]
pub struct FzValue {
    pub series: SeriesValue,
    pub shifted: ContractionCertificate,
}

/// `F_z(A) = sum_{n <= depth} z^n binom(A - 1, n)` for `|z| <= 1/p`.
pub fn f_z_series(cert: &ContractionCertificate, z: &Padic, depth: usize) -> Result<FzValue> {
    let ctx = cert.operator.context();
    if !z.valuation().at_least(1) {
        return Err(Error::PreconditionFailed(alloc::format!("|z| must be at most 1/p, z = {z}")));
    }
    let shifted_op = cert.operator.add_scalar(&ctx.int(-1));
    let shifted = certify_normal_contraction(&shifted_op, depth)?;
    let mut acc = Matrix::zero(ctx);
    let mut zn = ctx.one();
    for n in 0..=depth {
        if zn.is_zero() {
            break;
        }
        acc = acc.add(&binom_operator(&shifted, n)?.scale(&zn));
        zn = &zn * z;
    }
    let error_bound = z.norm().pow(depth as i64 + 1);
    Ok(FzValue { series: SeriesValue { value: acc, error_bound }, shifted })
}

/// `(X - l_1)...(X - l_{p-1}) / ((-1)^(p-1) l_1...l_{p-1})` over the nonzero
/// Teichmüller representatives: 1 at 0 and 0 at every `l_i`.
pub fn teichmuller_indicator_polynomial(ctx: Context) -> Result<PadicPolynomial> {
    let p = ctx.prime() as i64;
    let roots = (1..p).map(|i| ctx.int(i).teichmuller()).collect::<Result<Vec<_>>>()?;
    let prod = roots.iter().fold(ctx.one(), |acc, r| acc * r);
    let sign = if (p - 1) % 2 == 0 { ctx.one() } else { ctx.int(-1) };
    PadicPolynomial::from_roots(ctx, &roots).div_scalar(&(sign * prod))
}

/// Idempotent limit of `P(A^(p^k))`, with the per-iteration trace.
#[derive(Clone, Debug)]
pub struct TeichmullerIdempotent {
    pub value: Matrix,
    pub iterations: usize,
    /// `(k, valuation of |E_k - E_(k-1)|)`.
    pub trace: Vec<(usize, Valuation)>,
}

/// Iterates `B_(k+1) = B_k^p` and `E_k = P(B_k)` until successive values
/// agree to `p^-target` and `E` is idempotent to the same accuracy.
pub fn teichmuller_idempotent(
    cert: &ContractionCertificate,
    target: i64,
    budget: usize,
) -> Result<TeichmullerIdempotent> {
    let ctx = cert.operator.context();
    let poly = teichmuller_indicator_polynomial(ctx)?;
    let p = ctx.prime() as u64;
    let mut b = cert.operator.clone();
    let mut e = b.eval_poly(&poly);
    let mut trace = Vec::new();
    for k in 1..=budget {
        b = b.pow(p);
        let next = b.eval_poly(&poly);
        let diff = next.sub(&e).norm().exponent;
        trace.push((k, diff));
        e = next;
        if diff.at_least(target) && e.is_idempotent_within(target) {
            return Ok(TeichmullerIdempotent { value: e, iterations: k, trace });
        }
    }
    Err(Error::NoConvergence { iterations: budget })
}

/// The operator with `A(delta_n) = n delta_n + (n+1) delta_(n+1)`, cut to
/// indices `< size`.
pub fn counting_bidiagonal(ctx: Context, size: usize) -> Matrix {
    let entries = (0..size).flat_map(|n| {
        let v = ctx.int(n as i64);
        let below = (n + 1 < size).then(|| (n + 1, n, ctx.int(n as i64 + 1)));
        core::iter::once((n, n, v)).chain(below)
    });
    Matrix::from_entries(ctx, entries)
}

/// Tab-separated rows with a header line.
pub fn trace_tsv(header: &[&str], rows: &[(usize, Valuation)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", header.join("\t"));
    for (k, v) in rows {
        let _ = writeln!(out, "{k}\t{v}");
    }
    out
}
