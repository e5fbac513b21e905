use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use padic_opalg_core::calculus::{
    certify_normal_contraction, f_z_series, functional_calculus, teichmuller_idempotent, trace_tsv,
    ContractionCertificate,
};
use padic_opalg_core::idempotents::{
    idempotent_equivalence, idempotent_lift, idempotent_refine, idempotent_split, k0_trivialize,
    near_idempotent_equivalence, sum_ring_generators,
};
use padic_opalg_core::scale::{probe_tsv, scale_minor_probe, willis_scale_finite};
use padic_opalg_core::{Context, Error, IntPolynomial, MahlerFunction, Matrix, Operator, Padic, Valuation};
use serde::Serialize;

use crate::config::{self, ExperimentConfig};
use crate::format::{parse_scalar, scalar, MahlerFile, OperatorFile, SchemeDoc};
use crate::CliError;

pub type Output = Result<String, CliError>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_operator(path: &Path) -> Result<Operator, CliError> {
    Ok(read_json::<OperatorFile>(path)?.operator()?)
}

/// The materialized matrix, or the upper-left `k x k` block when asked.
pub fn load_matrix(path: &Path, truncate: Option<usize>) -> Result<Matrix, CliError> {
    let file: OperatorFile = read_json(path)?;
    match truncate {
        Some(k) => Ok(file.operator()?.truncate(k)),
        None => Ok(file.matrix()?),
    }
}

fn to_json<T: Serialize>(value: &T) -> Output {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_trace(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    if let Some(path) = path {
        std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn valuation_json(v: Valuation) -> Option<i64> {
    v.finite()
}

#[derive(Serialize)]
struct MahlerReport {
    #[serde(flatten)]
    function: MahlerFile,
    /// Valuation of the sup norm; absent for the zero function.
    sup_norm_valuation: Option<i64>,
}

pub fn mahler_expand(cfg: &ExperimentConfig, samples: &[String]) -> Output {
    let ctx = cfg.context();
    let samples = samples.iter().map(|s| parse_scalar(ctx, s)).collect::<Result<Vec<Padic>, _>>()?;
    let f = MahlerFunction::expand(ctx, &samples)?;
    to_json(&MahlerReport { function: MahlerFile::from_function(&f), sup_norm_valuation: f.sup_norm().exponent.finite() })
}

pub fn mahler_eval(input: &Path, x: &str) -> Output {
    let f = read_json::<MahlerFile>(input)?.function()?;
    let value = f.eval(&parse_scalar(f.context(), x)?)?;
    Ok(format!("{}\n", scalar(&value)))
}

#[derive(Serialize)]
struct CertificateReport {
    structural: bool,
    depth: usize,
    /// `(n, achieved valuation, required valuation)`.
    checked: Vec<(usize, Option<i64>, u64)>,
}

fn certificate_report(cert: &ContractionCertificate) -> CertificateReport {
    let p = cert.operator().context().prime();
    CertificateReport {
        structural: cert.is_structural(),
        depth: cert.depth(),
        checked: cert
            .checked()
            .iter()
            .map(|(n, v)| (*n, valuation_json(*v), padic_opalg_core::combinatorics::factorial_valuation(*n as u64, p)))
            .collect(),
    }
}

pub fn calculus_certify(cfg: &ExperimentConfig, input: &Path, depth: Option<usize>, truncate: Option<usize>) -> Output {
    let a = load_matrix(input, truncate)?;
    let depth = depth.unwrap_or(cfg.budget(config::CERTIFY_DEPTH) as usize);
    to_json(&certificate_report(&certify_normal_contraction(&a, depth)?))
}

#[derive(Serialize)]
struct SeriesReport {
    operator: OperatorFile,
    /// Valuation of the bound on the neglected tail; absent when exact.
    error_bound_valuation: Option<i64>,
}

pub fn calculus_apply(
    cfg: &ExperimentConfig,
    input: &Path,
    poly: Option<&[i64]>,
    mahler: Option<&Path>,
    truncate: Option<usize>,
) -> Output {
    let a = load_matrix(input, truncate)?;
    let ctx = a.context();
    let f = match (poly, mahler) {
        (Some(c), None) => MahlerFunction::from_polynomial(ctx, &IntPolynomial::from_i64(c))?,
        (None, Some(path)) => read_json::<MahlerFile>(path)?.function()?,
        _ => return Err(CliError::Input("give exactly one of --poly and --mahler".into())),
    };
    let depth = f.len().saturating_sub(1).max(cfg.budget(config::CERTIFY_DEPTH) as usize);
    let cert = certify_normal_contraction(&a, depth)?;
    let value = functional_calculus(&cert, &f)?;
    to_json(&SeriesReport {
        operator: OperatorFile::from_matrix(&value.value),
        error_bound_valuation: value.error_bound.exponent.finite(),
    })
}

#[derive(Serialize)]
struct IdempotentReport {
    operator: OperatorFile,
    iterations: usize,
}

pub fn calculus_teich_idem(cfg: &ExperimentConfig, input: &Path, truncate: Option<usize>, trace: Option<&PathBuf>) -> Output {
    let a = load_matrix(input, truncate)?;
    let cert = certify_normal_contraction(&a, cfg.budget(config::CERTIFY_DEPTH) as usize)?;
    let t = teichmuller_idempotent(&cert, cfg.target_valuation, cfg.budget(config::TEICHMULLER_ITERATIONS) as usize)?;
    write_trace(trace, &trace_tsv(&["k", "valuation"], &t.trace))?;
    to_json(&IdempotentReport { operator: OperatorFile::from_matrix(&t.value), iterations: t.iterations })
}

pub fn calculus_fz(cfg: &ExperimentConfig, input: &Path, z: &str, depth: Option<usize>, truncate: Option<usize>) -> Output {
    let a = load_matrix(input, truncate)?;
    let depth = depth.unwrap_or(cfg.budget(config::CERTIFY_DEPTH) as usize);
    let cert = certify_normal_contraction(&a, depth)?;
    let value = f_z_series(&cert, &parse_scalar(a.context(), z)?, depth)?;
    to_json(&SeriesReport {
        operator: OperatorFile::from_matrix(&value.series.value),
        error_bound_valuation: value.series.error_bound.exponent.finite(),
    })
}

#[derive(Serialize)]
struct RefineReport {
    operator: OperatorFile,
    /// Exact valuation of `|a - e|`.
    distance_valuation: Option<i64>,
    m: u64,
}

fn refine_trace(trace: &[(u64, Valuation)]) -> String {
    let rows: Vec<(usize, Valuation)> = trace.iter().map(|(m, v)| (*m as usize, *v)).collect();
    trace_tsv(&["m", "valuation"], &rows)
}

pub fn idem_refine(cfg: &ExperimentConfig, input: &Path, trace: Option<&PathBuf>) -> Output {
    let a = load_matrix(input, None)?;
    let r = idempotent_refine(&a, cfg.target_valuation, cfg.budget(config::REFINE_MAX_M))?;
    write_trace(trace, &refine_trace(&r.trace))?;
    to_json(&RefineReport {
        operator: OperatorFile::from_matrix(&r.value),
        distance_valuation: valuation_json(r.distance),
        m: r.m,
    })
}

#[derive(Serialize)]
struct EquivalenceReport {
    u: OperatorFile,
    u_inv: OperatorFile,
    terms: usize,
    verified: bool,
    /// The refined idempotent when `f` was only near-idempotent.
    #[serde(skip_serializing_if = "Option::is_none")]
    refined: Option<OperatorFile>,
}

pub fn idem_equiv(cfg: &ExperimentConfig, e: &Path, f: &Path, near: bool) -> Output {
    let e = load_matrix(e, None)?;
    let f = load_matrix(f, None)?;
    let target = cfg.target_valuation;
    let budget = cfg.budget(config::NEUMANN_TERMS) as usize;
    let (w, refined) = if near {
        let (r, w) = near_idempotent_equivalence(&e, &f, target, cfg.budget(config::REFINE_MAX_M), budget)?;
        (w, Some(r.value))
    } else {
        (idempotent_equivalence(&e, &f, target, budget)?, None)
    };
    let verified = w.verify(&e, refined.as_ref().unwrap_or(&f), target);
    to_json(&EquivalenceReport {
        u: OperatorFile::from_matrix(&w.u),
        u_inv: OperatorFile::from_matrix(&w.u_inv),
        terms: w.terms,
        verified,
        refined: refined.as_ref().map(OperatorFile::from_matrix),
    })
}

#[derive(Serialize)]
struct SplitReport {
    n: Option<usize>,
    spanning_columns: Vec<usize>,
    f: OperatorFile,
    g: OperatorFile,
    checks: BTreeMap<&'static str, bool>,
}

pub fn idem_split(cfg: &ExperimentConfig, input: &Path) -> Output {
    let e = load_matrix(input, None)?;
    let s = idempotent_split(&e, cfg.target_valuation)?;
    to_json(&SplitReport {
        n: s.n,
        spanning_columns: s.spanning_columns.clone(),
        f: OperatorFile::from_matrix(&s.f),
        g: OperatorFile::from_matrix(&s.g),
        checks: s.checks(&e, cfg.target_valuation).into_iter().collect(),
    })
}

#[derive(Serialize)]
struct LiftReport {
    operator: OperatorFile,
    n: u64,
    m: u64,
    k: u64,
    compact_difference: bool,
}

pub fn idem_lift(cfg: &ExperimentConfig, input: &Path, trace: Option<&PathBuf>) -> Output {
    let a = load_matrix(input, None)?;
    let l = idempotent_lift(&a, cfg.target_valuation, cfg.budget(config::LIFT_POWERS), cfg.budget(config::REFINE_MAX_M))?;
    write_trace(trace, &refine_trace(&l.refinement.trace))?;
    to_json(&LiftReport {
        compact_difference: l.value.sub(&a).is_compact(),
        operator: OperatorFile::from_matrix(&l.value),
        n: l.n,
        m: l.m,
        k: l.k,
    })
}

pub fn idem_trivialize(cfg: &ExperimentConfig, input: &Path, scheme: &SchemeDoc, depth: usize, prefix: usize) -> Output {
    let e = load_matrix(input, None)?;
    let t = k0_trivialize(
        &e,
        cfg.target_valuation,
        cfg.budget(config::REFINE_MAX_M),
        crate::format::scheme_from_doc(scheme),
        depth,
        prefix,
    )?;
    Ok(t.to_text(cfg.target_valuation))
}

#[derive(Serialize)]
struct SumRingReport {
    scheme: SchemeDoc,
    checked: usize,
    relation_failures: Vec<(&'static str, usize)>,
    generators: BTreeMap<&'static str, OperatorFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    infinite_sum_failures: Option<Vec<usize>>,
}

pub fn idem_sumring(
    cfg: &ExperimentConfig,
    scheme: &SchemeDoc,
    range: usize,
    input: Option<&Path>,
    depth: usize,
) -> Output {
    let ctx: Context = match input {
        Some(path) => read_json::<OperatorFile>(path)?.context()?,
        None => cfg.context(),
    };
    let s = sum_ring_generators(ctx, crate::format::scheme_from_doc(scheme));
    let infinite_sum_failures = match input {
        Some(path) => {
            let a = load_operator(path)?;
            let a_inf = s.infinite_sum(&a, depth)?;
            let covered: Vec<usize> = (0..range).filter(|&x| s.block(x) < depth).collect();
            let lhs = s.boxplus(&a, &a_inf);
            Some(covered.into_iter().filter(|&x| lhs.column(x) != a_inf.column(x)).collect())
        }
        None => None,
    };
    let generators = [("alpha0", &s.alpha0), ("beta0", &s.beta0), ("alpha1", &s.alpha1), ("beta1", &s.beta1)]
        .into_iter()
        .map(|(name, op)| (name, OperatorFile::from_operator(op)))
        .collect();
    to_json(&SumRingReport {
        scheme: scheme.clone(),
        checked: range,
        relation_failures: s.relation_failures(0..range),
        generators,
        infinite_sum_failures,
    })
}

pub fn scale_finite(input: &Path, dim: Option<usize>) -> Output {
    let a = load_matrix(input, None)?;
    let n = dim.unwrap_or_else(|| a.index_bound());
    Ok(format!("{}\n", willis_scale_finite(&a, n)?))
}

pub fn scale_probe(input: &Path, bounds: &[usize]) -> Output {
    let a = load_operator(input)?;
    Ok(probe_tsv(&scale_minor_probe(&a, bounds)?))
}

pub fn verify_all(cfg: &ExperimentConfig) -> Result<(String, bool), CliError> {
    let results = crate::suite::run_suite(cfg);
    let mut out = String::new();
    let mut passed = 0;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        if r.passed {
            passed += 1;
        }
        let _ = writeln!(out, "{status}\t{}\t{}", r.name, r.detail);
    }
    let _ = writeln!(out, "summary\t{passed}/{} passed\tp={} precision={} seed={}", results.len(), cfg.prime, cfg.precision, cfg.seed);
    Ok((out, passed == results.len()))
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::PrimeMismatch { .. } => "prime_mismatch",
        Error::DivisionByZero => "division_by_zero",
        Error::PrecisionExhausted { .. } => "precision_exhausted",
        Error::NonIntegral { .. } => "non_integral",
        Error::Undecidable(_) => "undecidable",
        Error::NotMaterializable(_) => "not_materializable",
        Error::CertificationFailed { .. } => "certification_failed",
        Error::NoConvergence { .. } => "no_convergence",
        Error::PreconditionFailed(_) => "precondition_failed",
        Error::DependentBasis { .. } => "dependent_basis",
        Error::SearchExhausted { .. } => "search_exhausted",
        Error::InvalidInput(_) => "invalid_input",
        Error::Parse(_) => "parse",
    }
}
