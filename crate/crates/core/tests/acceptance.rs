mod common;

use common::*;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use padic_opalg_core::calculus::{
    certify_normal_contraction, counting_bidiagonal, functional_calculus, teichmuller_idempotent,
};
use padic_opalg_core::combinatorics::{binomial_padic, factorial_valuation, vandermonde_coefficients};
use padic_opalg_core::dense;
use padic_opalg_core::idempotents::{
    finite_rank_reduce, idempotent_equivalence, idempotent_lift, idempotent_refine, idempotent_split,
    near_idempotent_equivalence, pm_polynomial, sum_ring_generators,
};
use padic_opalg_core::scale::{scale_transpose_check, willis_scale_rows};
use padic_opalg_core::{Context, IntPolynomial, MahlerFunction, Matrix, Operator, Padic, PairingScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const PRECISION: u32 = 40;
const TARGET: i64 = 30;

macro_rules! check {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ctx(p: u32) -> Context {
    Context::new(p, PRECISION).unwrap()
}

fn fact(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn choose(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    fact(n) / (fact(k) * fact(n - k))
}

/// Coefficients of `binom(X, k)` over `Q`, lowest degree first.
fn binom_poly(k: u64) -> Vec<Q> {
    let mut poly = vec![Q::one()];
    for j in 0..k {
        let mut next = vec![Q::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * q(j as i64);
        }
        poly = next;
    }
    let d = Q::from_integer(fact(k));
    poly.into_iter().map(|c| c / &d).collect()
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_scaled(acc: &mut Vec<Q>, b: &[Q], s: &Q) {
    if acc.len() < b.len() {
        acc.resize(b.len(), Q::zero());
    }
    for (i, y) in b.iter().enumerate() {
        acc[i] += y * s;
    }
}

fn poly_eq(a: &[Q], b: &[Q]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| a.get(i).cloned().unwrap_or_else(Q::zero) == b.get(i).cloned().unwrap_or_else(Q::zero))
}

fn criterion_1() -> Outcome {
    for m in 0..=8u64 {
        for n in 0..=8u64 {
            let lhs = poly_mul(&binom_poly(m), &binom_poly(n));
            let mut rhs = Vec::new();
            for (l, c) in vandermonde_coefficients(m, n) {
                poly_add_scaled(&mut rhs, &binom_poly(l), &Q::from_integer(c.into()));
            }
            check!(poly_eq(&lhs, &rhs), "symbolic identity fails for m={m}, n={n}");
        }
    }
    let mut r = rng(1);
    let mut cases = 0;
    for p in [2u32, 3, 5, 7] {
        let c = ctx(p);
        for _ in 0..25 {
            let x = random_zp(&mut r, c, PRECISION);
            let binoms: Vec<Padic> = (0..=16).map(|k| binomial_padic(&x, k).unwrap()).collect();
            for m in 0..=8u64 {
                for n in 0..=8u64 {
                    let lhs = &binoms[m as usize] * &binoms[n as usize];
                    let rhs = vandermonde_coefficients(m, n)
                        .into_iter()
                        .fold(c.zero(), |acc, (l, k)| acc + Padic::from_biguint(c, &k) * &binoms[l as usize]);
                    let allowed = PRECISION as i64 - factorial_valuation(m + n, p) as i64;
                    check!((lhs - rhs).valuation().at_least(allowed), "p={p}, x={x}, m={m}, n={n}");
                }
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} random x over p in {{2,3,5,7}}, m, n <= 8; symbolic identity over Q"))
}

fn criterion_2() -> Outcome {
    for p in [2u32, 3, 5, 7] {
        for n in 0..=1000u64 {
            let mut legendre = 0;
            let mut pk = p as u64;
            while pk <= n {
                legendre += n / pk;
                pk *= p as u64;
            }
            check!(factorial_valuation(n, p) == legendre, "p={p}, n={n}");
        }
    }
    Ok("n <= 1000, p in {2,3,5,7}".into())
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let p = 3;
    let c = ctx(p);
    for case in 0..50 {
        let degree = r.gen_range(0..=10usize);
        let coeffs: Vec<BigInt> = (0..=degree)
            .map(|_| BigInt::from(r.gen_range(-20i64..=20)) * BigInt::from(3).pow(r.gen_range(0..3)))
            .collect();
        let f = IntPolynomial::new(coeffs);
        let values: Vec<BigInt> = (0..=degree as i64).map(|x| f.eval(&BigInt::from(x))).collect();
        let samples: Vec<Padic> = values.iter().map(|v| Padic::from_bigint(c, v)).collect();
        let mf = MahlerFunction::expand(c, &samples).map_err(|e| e.to_string())?;
        for (x, s) in samples.iter().enumerate() {
            check!(mf.eval(&c.int(x as i64)).unwrap() == *s, "case {case}: sample {x} not reproduced");
        }
        for _ in 0..5 {
            let x = r.gen_range(0..10_000i64);
            let expected = Padic::from_bigint(c, &f.eval(&BigInt::from(x)));
            check!(mf.eval(&c.int(x)).unwrap() == expected, "case {case}: value at {x}");
        }
        // sup over Z_p of a polynomial is attained on 0..=degree
        let sup = values.iter().filter_map(|v| p_valuation_int(v, p)).min();
        let got = mf.sup_norm().exponent.finite();
        check!(got == sup.map(|v| v as i64), "case {case}: sup norm {got:?} vs oracle {sup:?}");
    }
    Ok("50 random polynomials of degree <= 10".into())
}

fn random_int_poly(r: &mut ChaCha8Rng, max_degree: usize) -> IntPolynomial {
    let d = r.gen_range(0..=max_degree);
    IntPolynomial::new((0..=d).map(|_| BigInt::from(r.gen_range(-5i64..=5))).collect())
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let c = ctx(3);
    let mut cases = 0;
    for case in 0..20 {
        let a = if case % 2 == 0 {
            let size = r.gen_range(1..=5);
            let entries: Vec<(usize, Padic)> = (0..size).map(|i| (i, c.int(r.gen_range(-20..=20)))).collect();
            Matrix::diagonal(c, entries, c.int(r.gen_range(-20..=20)))
        } else {
            counting_bidiagonal(c, r.gen_range(2..=7))
        };
        let cert = certify_normal_contraction(&a, 12).map_err(|e| format!("case {case}: {e}"))?;
        let f = random_int_poly(&mut r, 6);
        let g = random_int_poly(&mut r, 6);
        let mf = MahlerFunction::from_polynomial(c, &f).unwrap();
        let mg = MahlerFunction::from_polynomial(c, &g).unwrap();
        let pf = functional_calculus(&cert, &mf).unwrap();
        let pg = functional_calculus(&cert, &mg).unwrap();
        let pfg = functional_calculus(&cert, &mf.mul(&mg)).unwrap();
        check!(pfg.error_bound.is_zero(), "case {case}: polynomial product has a tail");
        check!(pfg.value == pf.value.mul(&pg.value), "case {case}: pi(fg) != pi(f) pi(g)");
        // independent evaluation of the polynomial on the operator
        check!(pf.value == a.eval_poly(&f.to_padic(c)), "case {case}: pi(f) != f(A)");
        let id = functional_calculus(&cert, &MahlerFunction::identity(c)).unwrap();
        check!(id.value == a, "case {case}: pi(id) != A");
        cases += 1;
    }
    Ok(format!("{cases} operators (diagonal and truncated bidiagonal), degree <= 6"))
}

fn criterion_5() -> Outcome {
    let c = ctx(3);
    let a = counting_bidiagonal(c, 7);
    let mut falling = Matrix::identity(c).truncate(7);
    for k in 0..=5u64 {
        falling = falling.mul(&a.add_scalar(&c.int(-(k as i64))).truncate(7));
        for n in 0..=5u64 {
            for i in 0..=5u64 {
                let expected = if i > n {
                    BigInt::zero()
                } else {
                    choose(k + 1, n - i) * choose(n, k + 1) * fact(k + 1)
                };
                let got = falling.entry(n as usize, i as usize);
                check!(got == Padic::from_bigint(c, &expected), "k={k}, entry ({n},{i}): {got} vs {expected}");
            }
        }
    }
    Ok("n, k <= 5".into())
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let c = ctx(5);
    let mut max_iter = 0;
    for case in 0..30 {
        let size = r.gen_range(1..=6);
        let values: Vec<i64> = (0..=size).map(|_| r.gen_range(-200..=200)).collect();
        let a = Matrix::diagonal(c, (0..size).map(|i| (i, c.int(values[i]))), c.int(values[size]));
        let cert = certify_normal_contraction(&a, 4).map_err(|e| format!("case {case}: {e}"))?;
        let t = teichmuller_idempotent(&cert, TARGET, PRECISION as usize).map_err(|e| format!("case {case}: {e}"))?;
        check!(t.iterations <= PRECISION as usize, "case {case}: {} iterations", t.iterations);
        check!(t.value.is_idempotent_within(TARGET), "case {case}: E^2 != E");
        let indicator = |v: i64| if v % 5 == 0 { c.one() } else { c.zero() };
        for i in 0..=size {
            let got = if i < size { t.value.entry(i, i) } else { t.value.tail().clone() };
            check!((got - indicator(values[i])).valuation().at_least(TARGET), "case {case}: coordinate {i}");
        }
        check!(t.value.explicit().all(|((i, j), _)| i == j), "case {case}: E is not diagonal");
        max_iter = max_iter.max(t.iterations);
    }
    Ok(format!("30 diagonals, p = 5, at most {max_iter} iterations"))
}

/// The unique polynomial of degree < 2m with value 0 and m-1 vanishing
/// derivatives at 0, value 1 and m-1 vanishing derivatives at 1.
fn pm_by_linear_system(m: usize) -> Vec<Q> {
    let size = 2 * m;
    let mut rows: QMat = Vec::new();
    let mut rhs = Vec::new();
    for (point, value) in [(0i64, 0i64), (1, 1)] {
        for d in 0..m {
            // d-th derivative of X^j at point
            let row = (0..size)
                .map(|j| {
                    if j < d {
                        Q::zero()
                    } else {
                        let falling: BigInt = (0..d).map(|t| BigInt::from((j - t) as i64)).product();
                        Q::from_integer(falling * BigInt::from(point).pow((j - d) as u32))
                    }
                })
                .collect();
            rows.push(row);
            rhs.push(if d == 0 { q(value) } else { Q::zero() });
        }
    }
    let inv = q_inverse(&rows).expect("conditions determine the polynomial");
    let col: QMat = rhs.into_iter().map(|x| vec![x]).collect();
    q_mul(&inv, &col).into_iter().map(|r| r[0].clone()).collect()
}

fn criterion_7() -> Outcome {
    for m in 1..=6u64 {
        let diff = pm_polynomial(m + 1).sub(&pm_polynomial(m));
        let x2x = IntPolynomial::from_i64(&[0, -1, 1]).pow(m as u32);
        check!(diff.divisible_by_monic(&x2x), "divisibility fails at m={m}");
        let oracle = pm_by_linear_system(m as usize);
        let got: Vec<Q> = pm_polynomial(m).coefficients().iter().map(|c| Q::from_integer(c.clone())).collect();
        check!(poly_eq(&got, &oracle), "P_{m} disagrees with the linear-system oracle");
    }
    let mut r = rng(7);
    let p = 3;
    let c = ctx(p);
    for case in 0..100 {
        let rank = r.gen_range(1..=4);
        let n = rank + r.gen_range(0..=2);
        let u = random_unit_matrix(&mut r, n, p);
        let e = to_matrix(c, &conjugated_projection(&u, rank));
        let noise = to_matrix(c, &random_int_matrix(&mut r, n, 4)).scale(&Padic::p_power(c, 3));
        let a = e.add(&noise);
        check!(a.norm().exponent.finite() == Some(0), "case {case}: |a| != 1");
        check!(a.mul(&a).sub(&a).norm().within(3), "case {case}: |a^2 - a| > p^-3");
        let out = idempotent_refine(&a, TARGET, 256).map_err(|e| format!("case {case}: {e}"))?;
        check!(out.value.is_idempotent_within(TARGET), "case {case}: e^2 != e");
        check!(a.sub(&out.value).norm().exponent.at_least(1), "case {case}: |a - e| >= 1");
    }
    Ok("100 near-idempotents of rank <= 4; P_m identities for m <= 6".into())
}

fn padic_rank(m: &Matrix, n: usize) -> usize {
    dense::rank_within(&m.to_rows(n), Some(TARGET))
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let p = 3;
    let c = ctx(p);
    let exact = PRECISION as i64;
    for case in 0..50 {
        let rank = r.gen_range(1..=3);
        let n = rank + r.gen_range(0..=2);
        let u = random_unit_matrix(&mut r, n, p);
        let eq = conjugated_projection(&u, rank);
        let e = to_matrix(c, &eq);
        let (f, witness, f_rank) = if case % 2 == 0 {
            // conjugate by v = 1 + pN, which moves e by less than 1
            let big_n = random_int_matrix(&mut r, n, 2);
            let v: QMat = q_identity(n)
                .iter()
                .zip(&big_n)
                .map(|(row, nrow)| row.iter().zip(nrow).map(|(x, y)| x + y * q(p as i64)).collect())
                .collect();
            let fq = q_mul(&q_mul(&v, &eq), &q_inverse(&v).unwrap());
            let f = to_matrix(c, &fq);
            let w = idempotent_equivalence(&e, &f, exact, 400).map_err(|err| format!("case {case}: {err}"))?;
            (f, w, q_rank(&fq))
        } else {
            let noise = to_matrix(c, &random_int_matrix(&mut r, n, 4)).scale(&Padic::p_power(c, 4));
            let a = e.add(&noise);
            let (refined, w) = near_idempotent_equivalence(&e, &a, exact, 256, 400)
                .map_err(|err| format!("case {case}: {err}"))?;
            let f_rank = padic_rank(&refined.value, n);
            (refined.value, w, f_rank)
        };
        check!(witness.verify(&e, &f, exact), "case {case}: u e u^-1 != f at precision {exact}");
        check!(q_rank(&eq) == rank && f_rank == rank, "case {case}: rank changed");
        let conj = witness.u.mul(&e).mul(&witness.u_inv);
        check!(padic_rank(&conj, n) == rank, "case {case}: rank of u e u^-1");
    }
    Ok(format!("50 witnesses verified to p^-{exact}"))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let p = 3;
    let c = ctx(p);
    let exact = PRECISION as i64;
    let mut by_count = [0usize; 4];
    let mut attempts = 0;
    while by_count[1..].iter().sum::<usize>() < 30 {
        attempts += 1;
        check!(attempts < 10_000, "could not construct enough test idempotents");
        let n = r.gen_range(2..=5);
        let rank = r.gen_range(1..n);
        // conjugating by s = 1 + N/p with N strictly lower triangular
        let s: QMat = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Equal => Q::one(),
                        std::cmp::Ordering::Greater if r.gen_bool(0.4) => q(r.gen_range(-2..=2)) / q(p as i64),
                        _ => Q::zero(),
                    })
                    .collect()
            })
            .collect();
        let eq = q_mul(&q_mul(&s, &conjugated_projection(&random_unit_matrix(&mut r, n, p), rank)), &q_inverse(&s).unwrap());
        let e = to_matrix(c, &eq);
        let count = e.exceptional_columns().len();
        if !(1..=3).contains(&count) || by_count[count] >= 10 {
            continue;
        }
        let split = idempotent_split(&e, exact).map_err(|err| format!("{err}"))?;
        for (name, ok) in split.checks(&e, exact) {
            check!(ok, "{count} exceptional columns: {name} fails for e = {e}");
        }
        by_count[count] += 1;
    }
    Ok(format!(
        "{} idempotents with 1/2/3 exceptional columns, checked to p^-{exact}",
        by_count[1..].iter().map(|k| k.to_string()).collect::<Vec<_>>().join("/")
    ))
}

fn criterion_10() -> Outcome {
    let mut r = rng(10);
    let c = ctx(3);
    let s = sum_ring_generators(c, PairingScheme::Cantor);
    let failures = s.relation_failures(0..256);
    check!(failures.is_empty(), "relations fail: {:?}", &failures[..failures.len().min(5)]);
    let depth = (0..64).map(|x| s.block(x)).max().unwrap() + 1;
    for case in 0..20 {
        let a = Operator::finite(
            c,
            (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (i, j, c.int(r.gen_range(-9..=9)))).collect::<Vec<_>>(),
        );
        let a_inf = s.infinite_sum(&a, depth).map_err(|e| e.to_string())?;
        let bad = s.infinite_sum_failures(&a, &a_inf, 0..64);
        check!(bad.is_empty(), "case {case}: equation fails on {:?}", bad);
        check!((0..64).all(|x| a_inf.column(x).norm().is_contractive()), "case {case}: a_inf not contractive");
    }
    Ok(format!("relations on delta_0..delta_255; 20 blocks on delta_0..delta_63 (depth {depth})"))
}

fn criterion_11() -> Outcome {
    let mut r = rng(11);
    let p = 3;
    let c = ctx(p);
    for case in 0..50 {
        let rank = r.gen_range(0..=3);
        let n = rank.max(1) + r.gen_range(0..=2);
        let u = random_unit_matrix(&mut r, n, p);
        let finite = to_matrix(c, &conjugated_projection(&u, rank));
        // half the cases use the complementary idempotent 1 - E
        let base = if case % 2 == 0 { finite } else { Matrix::identity(c).sub(&finite) };
        let support = n + 6;
        let perturbation = Matrix::from_entries(
            c,
            (0..6)
                .map(|_| {
                    let v = c.int(r.gen_range(-9..=9)) * Padic::p_power(c, r.gen_range(2..=4));
                    (r.gen_range(0..support), r.gen_range(0..support), v)
                })
                .collect::<Vec<_>>(),
        );
        let a = base.add(&perturbation);
        let lift = idempotent_lift(&a, TARGET, 64, 256).map_err(|e| format!("case {case}: {e}"))?;
        check!(lift.value.is_idempotent_within(TARGET), "case {case}: e^2 != e");
        check!(lift.value.sub(&a).is_compact(), "case {case}: e - a not compact");
    }
    Ok("50 finite idempotents plus compact perturbations of norm <= p^-2".into())
}

fn criterion_12() -> Outcome {
    let mut r = rng(12);
    let c = ctx(3);
    for case in 0..50 {
        let rank = case % 5;
        let n = rank.max(1) + r.gen_range(0..=2);
        let u = random_invertible(&mut r, n);
        let eq = conjugated_projection(&u, rank);
        check!(q_rank(&eq) == rank, "case {case}: oracle rank");
        let report = finite_rank_reduce(&to_matrix(c, &eq), TARGET, 256).map_err(|e| format!("case {case}: {e}"))?;
        check!(report.rank == rank, "case {case}: rank {} instead of {rank}", report.rank);
        check!(report.diagonal_form_is_standard(TARGET), "case {case}: diagonal form");
    }
    Ok("50 conjugated projections, r <= 4".into())
}

fn criterion_13() -> Outcome {
    let mut r = rng(13);
    let p = 3;
    let c = ctx(p);
    for case in 0..50 {
        let n = r.gen_range(1..=4);
        let eigen: Vec<Q> = (0..n)
            .map(|_| {
                let k = r.gen_range(-3i64..=3);
                let unit = q(*[1i64, -1, 2, -2, 4, 5, 7].get(r.gen_range(0..7)).unwrap());
                if k >= 0 { unit * q(3i64.pow(k as u32)) } else { unit / q(3i64.pow((-k) as u32)) }
            })
            .collect();
        let oracle: i64 = eigen.iter().map(|l| (-q_valuation(l, p).unwrap()).max(0)).sum();
        let s = random_unit_matrix(&mut r, n, p);
        let a = q_mul(&q_mul(&s, &q_diag(&eigen)), &q_inverse(&s).unwrap());
        let rows: Vec<Vec<Padic>> = a.iter().map(|row| row.iter().map(|x| to_padic(c, x)).collect()).collect();
        let got = willis_scale_rows(&rows, c).map_err(|e| e.to_string())?;
        check!(got.exponent as i64 == oracle, "case {case}: scale p^{} vs oracle p^{oracle}", got.exponent);
    }
    for case in 0..100 {
        let n = r.gen_range(1..=6);
        let rows: Vec<Vec<Padic>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| c.int(r.gen_range(-9..=9)) * Padic::p_power(c, r.gen_range(-2..=2)))
                    .collect()
            })
            .collect();
        check!(scale_transpose_check(&rows, c).map_err(|e| e.to_string())?, "case {case}: transpose changes the scale");
    }
    Ok("50 diagonalizable matrices against eigenvalue norms; 100 transposes".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("binomial product identity", criterion_1),
        ("factorial valuation", criterion_2),
        ("Mahler round trip and sup norm", criterion_3),
        ("functional calculus homomorphism", criterion_4),
        ("bidiagonal falling-factorial rows", criterion_5),
        ("Teichmuller idempotent", criterion_6),
        ("idempotent refinement", criterion_7),
        ("equivalence witnesses", criterion_8),
        ("idempotent split", criterion_9),
        ("sum-ring relations", criterion_10),
        ("idempotent lift modulo compacts", criterion_11),
        ("finite-rank reduction", criterion_12),
        ("scale", criterion_13),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
