//! The property suite behind `verify all`: small randomized instances of
//! every module invariant, deterministic in the configured seed.

use padic_opalg_core::calculus::{certify_normal_contraction, functional_calculus, teichmuller_idempotent};
use padic_opalg_core::combinatorics::factorial_valuation;
use padic_opalg_core::dense::{self, Rows};
use padic_opalg_core::idempotents::{
    finite_rank_reduce, idempotent_equivalence, idempotent_lift, idempotent_refine, idempotent_split,
    pm_polynomial, satisfies_pm_conditions, sum_ring_generators,
};
use padic_opalg_core::scale::{scale_transpose_check, willis_scale_rows};
use padic_opalg_core::{Context, Error, IntPolynomial, MahlerFunction, Matrix, Operator, Padic, PairingScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{self, ExperimentConfig};
use crate::format::OperatorFile;

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&ExperimentConfig, &mut ChaCha8Rng) -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn core<T>(r: Result<T, Error>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn int_rows(rng: &mut ChaCha8Rng, ctx: Context, n: usize) -> Rows {
    (0..n).map(|_| (0..n).map(|_| ctx.int(rng.gen_range(-3..=3))).collect()).collect()
}

/// A matrix in `GL_n(Z_p)` with its inverse.
fn unit_matrix(rng: &mut ChaCha8Rng, ctx: Context, n: usize) -> (Matrix, Matrix) {
    loop {
        let rows = int_rows(rng, ctx, n);
        if dense::det(&rows, ctx).valuation().finite() == Some(0) {
            let inv = dense::inverse(&rows, ctx).expect("unit determinant");
            return (Matrix::from_rows(ctx, &rows), Matrix::from_rows(ctx, &inv));
        }
    }
}

/// `u diag(1^rank, 0) u^-1` with `u` in `GL_n(Z_p)`.
fn projection(rng: &mut ChaCha8Rng, ctx: Context, n: usize, rank: usize) -> Matrix {
    let (u, u_inv) = unit_matrix(rng, ctx, n);
    let d = Matrix::diagonal(ctx, (0..rank).map(|i| (i, ctx.one())), ctx.zero());
    u.mul(&d).mul(&u_inv)
}

fn factorial_valuations(cfg: &ExperimentConfig, _: &mut ChaCha8Rng) -> Result<String, String> {
    let p = cfg.prime as u64;
    for n in 0..=300u64 {
        let mut legendre = 0;
        let mut pk = p;
        while pk <= n {
            legendre += n / pk;
            pk *= p;
        }
        ensure!(factorial_valuation(n, cfg.prime) == legendre, "n = {n}");
    }
    Ok("n <= 300".into())
}

fn mahler_round_trip(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    for case in 0..20 {
        let samples: Vec<Padic> = (0..rng.gen_range(1..=10)).map(|_| ctx.int(rng.gen_range(-500..=500))).collect();
        let f = core(MahlerFunction::expand(ctx, &samples))?;
        for (x, s) in samples.iter().enumerate() {
            ensure!(core(f.eval(&ctx.int(x as i64)))? == *s, "case {case}, sample {x}");
        }
        let min = samples.iter().map(|s| s.valuation()).min().expect("nonempty");
        ensure!(f.sup_norm().exponent == min, "case {case}: sup norm");
    }
    Ok("20 sample sets".into())
}

fn calculus_homomorphism(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    for case in 0..10 {
        let entries: Vec<(usize, Padic)> = (0..4).map(|i| (i, ctx.int(rng.gen_range(-20..=20)))).collect();
        let a = Matrix::diagonal(ctx, entries, ctx.int(rng.gen_range(-20..=20)));
        let cert = core(certify_normal_contraction(&a, 8))?;
        let poly = |rng: &mut ChaCha8Rng| {
            let coeffs: Vec<i64> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(-5..=5)).collect();
            IntPolynomial::from_i64(&coeffs)
        };
        let f = core(MahlerFunction::from_polynomial(ctx, &poly(rng)))?;
        let g = core(MahlerFunction::from_polynomial(ctx, &poly(rng)))?;
        let pf = core(functional_calculus(&cert, &f))?.value;
        let pg = core(functional_calculus(&cert, &g))?.value;
        let pfg = core(functional_calculus(&cert, &f.mul(&g)))?.value;
        ensure!(pfg == pf.mul(&pg), "case {case}: pi(fg) != pi(f) pi(g)");
        ensure!(core(functional_calculus(&cert, &MahlerFunction::identity(ctx)))?.value == a, "case {case}: pi(id)");
    }
    Ok("10 diagonals".into())
}

fn teichmuller(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    let p = cfg.prime as i64;
    for case in 0..5 {
        let values: Vec<i64> = (0..4).map(|_| rng.gen_range(-50..=50)).collect();
        let a = Matrix::diagonal(ctx, values.iter().enumerate().map(|(i, v)| (i, ctx.int(*v))), ctx.zero());
        let cert = core(certify_normal_contraction(&a, 4))?;
        let t = core(teichmuller_idempotent(&cert, cfg.target_valuation, cfg.budget(config::TEICHMULLER_ITERATIONS) as usize))?;
        for (i, v) in values.iter().enumerate() {
            let expected = if v % p == 0 { ctx.one() } else { ctx.zero() };
            ensure!((t.value.entry(i, i) - expected).valuation().at_least(cfg.target_valuation), "case {case}, entry {i}");
        }
    }
    Ok("5 diagonals".into())
}

fn refinement_polynomials(_: &ExperimentConfig, _: &mut ChaCha8Rng) -> Result<String, String> {
    for m in 1..=8 {
        ensure!(satisfies_pm_conditions(&pm_polynomial(m), m), "P_{m} conditions");
    }
    for m in 1..=6u64 {
        let diff = pm_polynomial(m + 1).sub(&pm_polynomial(m));
        ensure!(diff.divisible_by_monic(&IntPolynomial::from_i64(&[0, -1, 1]).pow(m as u32)), "divisibility at m = {m}");
    }
    Ok("m <= 8".into())
}

fn refinement(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    for case in 0..10 {
        let n = rng.gen_range(1..=4);
        let rank = rng.gen_range(1..=n);
        let e = projection(rng, ctx, n, rank);
        let noise = Matrix::from_rows(ctx, &int_rows(rng, ctx, n)).scale(&Padic::p_power(ctx, 3));
        let a = e.add(&noise);
        let r = core(idempotent_refine(&a, cfg.target_valuation, cfg.budget(config::REFINE_MAX_M)))?;
        ensure!(r.value.is_idempotent_within(cfg.target_valuation), "case {case}: not idempotent");
        ensure!(r.distance.at_least(1), "case {case}: |a - e| >= 1");
    }
    Ok("10 near-idempotents".into())
}

fn equivalence(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    let target = cfg.target_valuation;
    for case in 0..10 {
        let n = rng.gen_range(1..=4);
        let rank = rng.gen_range(1..=n);
        let e = projection(rng, ctx, n, rank);
        // v = 1 + pN is invertible with inverse congruent to 1
        let v_rows: Rows = (0..n)
            .map(|i| (0..n).map(|j| ctx.int((i == j) as i64 + cfg.prime as i64 * rng.gen_range(-2..=2))).collect())
            .collect();
        let v_inv = core(dense::inverse(&v_rows, ctx))?;
        let f = Matrix::from_rows(ctx, &v_rows).mul(&e).mul(&Matrix::from_rows(ctx, &v_inv));
        let w = core(idempotent_equivalence(&e, &f, target, cfg.budget(config::NEUMANN_TERMS) as usize))?;
        ensure!(w.verify(&e, &f, target), "case {case}: witness");
        let rank_f = dense::rank_within(&f.to_rows(n), Some(target));
        ensure!(rank_f == rank, "case {case}: rank {rank_f} vs {rank}");
    }
    Ok("10 witnesses".into())
}

fn splitting(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    let target = cfg.target_valuation;
    let inv_p = Padic::p_power(ctx, -1);
    for case in 0..10 {
        let n = rng.gen_range(2..=4);
        let rank = rng.gen_range(1..n);
        let inner = projection(rng, ctx, n, rank);
        // s = 1 + N/p with N a single subdiagonal entry
        let k = rng.gen_range(0..n - 1);
        let s = Matrix::identity(ctx).add(&Matrix::from_entries(ctx, [(k + 1, k, inv_p.clone())])).truncate(n);
        let s_inv = Matrix::identity(ctx).sub(&Matrix::from_entries(ctx, [(k + 1, k, inv_p.clone())])).truncate(n);
        let e = s.mul(&inner).mul(&s_inv);
        let split = core(idempotent_split(&e, target))?;
        for (name, ok) in split.checks(&e, target) {
            ensure!(ok, "case {case}: {name}");
        }
    }
    Ok("10 idempotents".into())
}

fn sum_ring(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    for scheme in [PairingScheme::Cantor, PairingScheme::Dyadic] {
        let s = sum_ring_generators(ctx, scheme);
        ensure!(s.relation_failures(0..256).is_empty(), "{scheme:?}: relations");
        let entries: Vec<(usize, usize, Padic)> =
            (0..16).map(|k| (k / 4, k % 4, ctx.int(rng.gen_range(-9..=9)))).collect();
        let a = Operator::finite(ctx, entries);
        let depth = (0..64).map(|x| s.block(x)).max().expect("nonempty") + 1;
        let a_inf = core(s.infinite_sum(&a, depth))?;
        ensure!(s.infinite_sum_failures(&a, &a_inf, 0..64).is_empty(), "{scheme:?}: infinite sum equation");
    }
    Ok("both pairing schemes on delta_0..delta_255".into())
}

fn lifting(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    for case in 0..10 {
        let n = rng.gen_range(1..=3);
        let rank = rng.gen_range(0..=n);
        let e = projection(rng, ctx, n, rank);
        let base = if case % 2 == 0 { e } else { Matrix::identity(ctx).sub(&e) };
        let c = Matrix::from_entries(
            ctx,
            (0..4).map(|_| (rng.gen_range(0..8), rng.gen_range(0..8), ctx.int(rng.gen_range(-9..=9)) * Padic::p_power(ctx, 2))),
        );
        let a = base.add(&c);
        let l = core(idempotent_lift(&a, cfg.target_valuation, cfg.budget(config::LIFT_POWERS), cfg.budget(config::REFINE_MAX_M)))?;
        ensure!(l.value.is_idempotent_within(cfg.target_valuation), "case {case}: not idempotent");
        ensure!(l.value.sub(&a).is_compact(), "case {case}: e - a not compact");
    }
    Ok("10 compact perturbations".into())
}

fn ranks(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    for case in 0..10 {
        let rank = case % 5;
        let n = rank.max(1) + rng.gen_range(0..=1);
        let e = projection(rng, ctx, n, rank);
        let report = core(finite_rank_reduce(&e, cfg.target_valuation, cfg.budget(config::REFINE_MAX_M)))?;
        ensure!(report.rank == rank, "case {case}: rank {} vs {rank}", report.rank);
    }
    Ok("10 projections".into())
}

fn scales(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    let diag = |vals: &[i64]| -> Rows {
        let n = vals.len();
        (0..n).map(|i| (0..n).map(|j| if i == j { Padic::p_power(ctx, vals[i]) } else { ctx.zero() }).collect()).collect()
    };
    ensure!(core(willis_scale_rows(&diag(&[-1, 1, 0]), ctx))?.exponent == 1, "Diagonal(1/p, p, 1)");
    ensure!(core(willis_scale_rows(&diag(&[-2, -1]), ctx))?.exponent == 3, "Diagonal(1/p^2, 1/p)");
    for case in 0..20 {
        let n = rng.gen_range(1..=5);
        let rows: Rows = (0..n)
            .map(|_| (0..n).map(|_| ctx.int(rng.gen_range(-9..=9)) * Padic::p_power(ctx, rng.gen_range(-2..=2))).collect())
            .collect();
        ensure!(core(scale_transpose_check(&rows, ctx))?, "case {case}: transpose");
        ensure!(core(willis_scale_rows(&int_rows(rng, ctx, n), ctx))?.exponent == 0, "case {case}: integral matrix");
    }
    Ok("hand examples and 20 transposes".into())
}

fn serialization(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = cfg.context();
    for case in 0..20 {
        let entries: Vec<(usize, usize, Padic)> = (0..rng.gen_range(0..6))
            .map(|_| {
                let x = core(Padic::from_ratio(ctx, rng.gen_range(-99..=99), rng.gen_range(1..=30)))?;
                Ok((rng.gen_range(0..5), rng.gen_range(0..5), x * Padic::p_power(ctx, rng.gen_range(-2..=2))))
            })
            .collect::<Result<_, String>>()?;
        let m = Matrix::with_tail(ctx, ctx.int(rng.gen_range(-3..=3)), entries);
        for file in [OperatorFile::from_matrix(&m), OperatorFile::from_operator(&Operator::from_matrix(&m))] {
            let text = serde_json::to_string(&file).map_err(|e| e.to_string())?;
            let back: OperatorFile = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let again = match &back.operator {
                crate::format::OperatorDoc::Matrix { .. } => OperatorFile::from_matrix(&core(back.matrix())?),
                _ => OperatorFile::from_operator(&core(back.operator())?),
            };
            ensure!(serde_json::to_string(&again).map_err(|e| e.to_string())? == text, "case {case}: round trip");
        }
    }
    Ok("20 matrices in both forms".into())
}

pub fn run_suite(cfg: &ExperimentConfig) -> Vec<CheckResult> {
    let checks: [(&'static str, Check); 13] = [
        ("factorial_valuation", factorial_valuations),
        ("mahler_round_trip", mahler_round_trip),
        ("calculus_homomorphism", calculus_homomorphism),
        ("teichmuller_idempotent", teichmuller),
        ("refinement_polynomials", refinement_polynomials),
        ("idempotent_refine", refinement),
        ("idempotent_equivalence", equivalence),
        ("idempotent_split", splitting),
        ("sum_ring", sum_ring),
        ("idempotent_lift", lifting),
        ("finite_rank_reduce", ranks),
        ("scale", scales),
        ("serialization", serialization),
    ];
    checks
        .iter()
        .enumerate()
        .map(|(k, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1_000_003).wrapping_add(k as u64));
            match check(cfg, &mut rng) {
                Ok(detail) => CheckResult { name, passed: true, detail },
                Err(detail) => CheckResult { name, passed: false, detail },
            }
        })
        .collect()
}
