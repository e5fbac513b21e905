use std::path::{Path, PathBuf};
use std::process::Command;

use padic_opalg::format::{MahlerFile, OperatorFile};
use padic_opalg_core::{
    Context, IndexRule, MahlerFunction, Matrix, Operator, Padic, PairingScheme, SumRingMap,
};
use serde_json::Value;

fn run_in(args: &[&str], env: Option<PathBuf>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("padic-opalg").chain(args.iter().copied());
    let code = padic_opalg::run(argv, env, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_in(args, None)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_all_passes() {
    let (code, out, _) = run(&["verify", "all", "--p", "3", "--precision", "40"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().last().unwrap().starts_with("summary\t13/13 passed"));
}

#[test]
fn refine_diagonal_example() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        r#"{"p":3,"precision":40,"kind":"diagonal","entries":[[0,"28"],[1,"27"]],"default":"0"}"#,
    );
    let trace = dir.path().join("t.tsv");
    let (code, out, err) = run(&["idem", "refine", "--in", &a, "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["distance_valuation"], 3);
    let e: OperatorFile = serde_json::from_value(report["operator"].clone()).unwrap();
    let e = e.matrix().unwrap();
    let ctx = e.context();
    assert!((e.entry(0, 0) - ctx.one()).valuation().at_least(30));
    assert!(e.entry(1, 1).valuation().at_least(30));
    assert!(e.entry(0, 1).is_zero() && e.tail().is_zero());
    let trace = std::fs::read_to_string(trace).unwrap();
    assert_eq!(trace.lines().next(), Some("m\tvaluation"));
    assert!(trace.lines().count() > 1);
}

#[test]
fn scale_of_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(
        dir.path(),
        "diag.json",
        r#"{"p":3,"precision":40,"kind":"diagonal","entries":[[0,"1/3"],[1,"3"],[2,"1"]],"default":"0"}"#,
    );
    let (code, out, _) = run(&["scale", "finite", "--in", &d]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "p^1");
}

#[test]
fn scale_probe_is_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(
        dir.path(),
        "diag.json",
        r#"{"p":5,"precision":20,"kind":"diagonal","entries":[[0,"1/25"],[1,"5"],[2,"1/5"]],"default":"1"}"#,
    );
    let (code, out, _) = run(&["scale", "probe", "--in", &d, "--bounds", "1,2,3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "K\texponent\n1\t2\n2\t2\n3\t3\n");
}

fn corpus() -> Vec<Operator> {
    let mut ops = Vec::new();
    for (p, prec) in [(2, 16), (3, 40), (5, 12), (11, 9), (13, 20)] {
        let c = Context::new(p, prec).unwrap();
        let x = |n: i64, d: i64, k: i64| Padic::from_ratio(c, n, d).unwrap() * Padic::p_power(c, k);
        let m = Matrix::with_tail(c, c.int(-1), [(0, 0, x(7, 3, 1)), (2, 5, x(-1, 1, -2)), (4, 1, c.zero())]);
        ops.push(Operator::from_matrix(&m));
        ops.push(Operator::finite(c, [(1, 2, x(1, 7, 0)), (3, 3, x(-22, 9, 3))]));
        ops.push(Operator::diagonal(c, [(0, x(1, 1, -1)), (4, x(5, 2, 2))], c.int(3)).unwrap());
        ops.push(Operator::identity(c));
        for (map, scheme) in [(SumRingMap::Alpha0, PairingScheme::Cantor), (SumRingMap::Beta1, PairingScheme::Dyadic)] {
            ops.push(
                Operator::index_map(c, IndexRule::SumRing(map, scheme), [(2, x(3, 1, 1))].into_iter().collect(), c.one())
                    .unwrap(),
            );
        }
        ops.push(Operator::index_map(c, IndexRule::Shift(2), Default::default(), x(1, 1, 1)).unwrap());
        let sum = Operator::sum(c, vec![ops[ops.len() - 1].clone(), Operator::identity(c)]);
        let prod = Operator::product(c, vec![sum, Operator::adjoint_of(ops[ops.len() - 2].clone())]);
        ops.push(Operator::scalar_mul(x(-4, 5, 1), prod).unwrap());
    }
    ops
}

#[test]
fn operator_files_round_trip_bit_exactly() {
    for op in corpus() {
        let text = serde_json::to_string_pretty(&OperatorFile::from_operator(&op)).unwrap();
        let back: OperatorFile = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&OperatorFile::from_operator(&back.operator().unwrap())).unwrap();
        assert_eq!(again, text);
        if let Ok(m) = op.materialize() {
            let text = serde_json::to_string(&OperatorFile::from_matrix(&m)).unwrap();
            let back: OperatorFile = serde_json::from_str(&text).unwrap();
            assert!(back.matrix().unwrap().approx_eq(&m));
            assert_eq!(serde_json::to_string(&OperatorFile::from_matrix(&back.matrix().unwrap())).unwrap(), text);
        }
    }
}

#[test]
fn scalars_and_mahler_files_round_trip() {
    for (p, prec) in [(2, 10), (3, 40), (7, 8), (101, 12)] {
        let c = Context::new(p, prec).unwrap();
        for (n, d, k) in [(0, 1, 0), (1, 1, 0), (-1, 1, 0), (22, 7, 3), (-5, 9, -4), (1000, 3, 1)] {
            let x = Padic::from_ratio(c, n, d).unwrap() * Padic::p_power(c, k);
            let text = padic_opalg::format::scalar(&x);
            let y = padic_opalg::format::parse_scalar(c, &text).unwrap();
            assert!(y.same_repr(&x), "{text}");
            assert_eq!(padic_opalg::format::scalar(&y), text);
        }
        let samples: Vec<Padic> = [4, -1, 9, 30, 2].iter().map(|v| c.int(*v)).collect();
        let f = MahlerFunction::expand(c, &samples).unwrap();
        let text = serde_json::to_string(&MahlerFile::from_function(&f)).unwrap();
        let back: MahlerFile = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&MahlerFile::from_function(&back.function().unwrap())).unwrap(), text);
    }
}

#[test]
fn identical_config_gives_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        r#"{"p":5,"precision":30,"kind":"finite","entries":[[0,0,"1"],[0,1,"1/5"]]}"#,
    );
    let b = write(
        dir.path(),
        "b.json",
        r#"{"p":5,"precision":30,"kind":"matrix","tail":"1","entries":[[0,0,"5"],[0,1,"3"],[2,2,"26"],[3,1,"2"]]}"#,
    );
    for args in [
        vec!["verify", "all", "--seed", "7"],
        vec!["idem", "split", "--in", &a, "--target", "20"],
        vec!["idem", "lift", "--in", &b, "--target", "20"],
        vec!["idem", "sumring", "--range", "64"],
        vec!["mahler", "expand", "--samples", "1,-4,9,16", "--p", "7", "--precision", "12", "--target", "10"],
    ] {
        let first = run(&args);
        assert_eq!(first.0, 0, "{args:?}: {}", first.2);
        assert_eq!(run(&args), first, "{args:?}");
    }
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "env.json", r#"{"prime": 5, "precision": 20, "target_valuation": 15, "seed": 4}"#);
    let file = write(dir.path(), "file.json", r#"{"prime": 7, "precision": 24, "target_valuation": 12}"#);
    let summary = |out: String| out.lines().last().unwrap().to_string();
    let (_, out, _) = run_in(&["verify", "all"], None);
    assert!(summary(out).ends_with("p=3 precision=40 seed=0"));
    let (_, out, _) = run_in(&["verify", "all"], Some(env.clone().into()));
    assert!(summary(out).ends_with("p=5 precision=20 seed=4"));
    let (_, out, _) = run_in(&["verify", "all", "--config", &file], Some(env.clone().into()));
    assert!(summary(out).ends_with("p=7 precision=24 seed=0"));
    let (_, out, _) = run_in(&["verify", "all", "--p", "2", "--seed", "9"], Some(env.into()));
    assert!(summary(out).ends_with("p=2 precision=20 seed=9"));
}

#[test]
fn binary_reads_config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "env.json", r#"{"prime": 11, "precision": 16, "target_valuation": 12}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_padic-opalg"))
        .args(["mahler", "expand", "--samples", "0,1,4"])
        .env(padic_opalg::config::CONFIG_ENV, &env)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["p"], 11);
    assert_eq!(report["precision"], 16);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let not_near = write(
        dir.path(),
        "n.json",
        r#"{"p":3,"precision":40,"kind":"diagonal","entries":[[0,"2"]],"default":"0"}"#,
    );
    let (code, _, err) = run(&["idem", "refine", "--in", &not_near]);
    assert_eq!(code, 2);
    let report: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(report["error"], "precondition_failed");
    assert_eq!(report["exit_code"], 2);

    let (code, _, err) = run(&["idem", "lift", "--in", &not_near, "--budget", "lift_powers=1"]);
    assert_eq!(code, 3, "{err}");

    let garbled = write(dir.path(), "g.json", r#"{"p":3,"precision":40,"kind":"finite","entries":[[0,0,"p^x"]]}"#);
    assert_eq!(run(&["idem", "refine", "--in", &garbled]).0, 4);
    assert_eq!(run(&["idem", "refine", "--in", "/nonexistent/a.json"]).0, 4);
    assert_eq!(run(&["idem", "frobnicate"]).0, 4);
    assert_eq!(run(&["verify", "all", "--p", "9"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn trivialize_transcript_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(
        dir.path(),
        "e.json",
        r#"{"p":3,"precision":40,"kind":"matrix","tail":"1","entries":[[1,1,"0"],[0,1,"1/3"]]}"#,
    );
    let (code, out, err) = run(&["idem", "trivialize", "--in", &e, "--target", "30"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().last(), Some("verified\ttrue"));
}
