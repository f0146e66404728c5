use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qrg_core::circuit::text::referee_to_text;
use qrg_core::circuit::{Circuit, Gate, Referee};
use qrg_core::game::qrg_value;
use qrg_core::gap::suite::random_circuit;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn referee(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../referees").join(name)
}

fn qrg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrg"))
        .args(args)
        .env_remove("QRG_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn value_of_bits_equal() {
    let r = json(&qrg(&["value", path(&referee("bits_equal.ref")), "--mode", "cqrg"]));
    assert_eq!(r["schema"], "qrg-run-report/1");
    assert_eq!(r["command"], "value");
    let res = &r["results"];
    assert!((res["value"].as_f64().unwrap() - 0.5).abs() <= 1e-4);
    assert!(res["duality_gap"].as_f64().unwrap() <= 1e-4);
    assert_eq!(res["converged"], true);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(r.get("wall_time").is_none());
}

#[test]
fn value_of_always_accept() {
    let r = json(&qrg(&["value", path(&referee("always_accept.ref"))]));
    assert_eq!(r["results"]["value"].as_f64(), Some(1.0));
    assert_eq!(r["results"]["duality_gap"].as_f64(), Some(0.0));
}

#[test]
fn every_shipped_referee_solves() {
    let expected = [
        ("always_accept.ref", 1.0),
        ("always_reject.ref", 0.0),
        ("bits_equal.ref", 0.5),
        ("equal_or_coin.ref", 0.75),
        ("matching_pennies.ref", 0.5),
        ("measured_bits_equal.ref", 0.5),
        ("single_message.ref", 0.5),
    ];
    for (name, v) in expected {
        let r = json(&qrg(&["value", path(&referee(name))]));
        assert!((r["results"]["value"].as_f64().unwrap() - v).abs() <= 1e-4, "{name}");
    }
}

#[test]
fn malformed_gate_line_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.ref");
    std::fs::write(&f, "mode cqrg\nalice 1\nbob 1\nbegin q\nH 0\nX 1\n").unwrap();
    let out = qrg(&["value", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 6"));
}

#[test]
fn input_errors_exit_one() {
    let out = qrg(&["value", path(&referee("bits_equal.ref")), "--mode", "qrg"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(qrg(&["value", "/nonexistent/file.ref"]).status.code(), Some(1));
    assert_eq!(qrg(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qrg(&["sparsify", path(&referee("matching_pennies.ref"))]).status.code(), Some(1));
    assert_eq!(qrg(&["--help"]).status.code(), Some(0));
}

#[test]
fn enumeration_cap_exits_two() {
    let out = qrg(&["predicate", path(&referee("bits_equal.ref")), "--exists", "--N", "30"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("requires 1073741824"));
}

/// A random QRG referee whose solver needs more than one iteration.
fn slow_referee(dir: &Path) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    loop {
        let mut gates = vec![Gate::Ancilla];
        let k = rng.gen_range(6..14);
        let body = random_circuit(&mut rng, 3, k, 3);
        if body.outputs() != 3 || body.gates().iter().any(|g| matches!(g, Gate::Ancilla | Gate::Erasure(_))) {
            continue;
        }
        gates.extend_from_slice(body.gates());
        gates.extend([Gate::Erasure(2), Gate::Erasure(1)]);
        let r = Referee::qrg(1, 1, Circuit::new(2, gates)).unwrap();
        if qrg_value(&r, 1e-4).unwrap().iterations > 5 {
            let f = dir.join("slow.ref");
            std::fs::write(&f, referee_to_text(&r)).unwrap();
            return f;
        }
    }
}

#[test]
fn non_convergence_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = slow_referee(dir.path());
    let out = qrg(&["value", path(&f), "--max-iterations", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["results"]["converged"], false);
    let ok = qrg(&["value", path(&f)]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn sparsify_reports() {
    let be = referee("bits_equal.ref");
    let r = json(&qrg(&["sparsify", path(&be), "--N", "216", "--trials", "2000", "--seed", "7"]));
    assert_eq!(r["seed"], 7);
    let e = &r["results"]["experiment"];
    assert!(e["failure_rate"].as_f64().unwrap() < 1.0 / 3.0);
    assert_eq!(e["within_target"], true);
    assert!((e["analytic_bound"].as_f64().unwrap() - 2.0 * (-3.0f64).exp()).abs() < 1e-12);
    assert_eq!(r["results"]["exploratory"], false);

    let single = json(&qrg(&["sparsify", path(&referee("single_message.ref"))]));
    assert_eq!(single["results"]["experiment"]["failures"], 0);

    let small = json(&qrg(&["sparsify", path(&be), "--N", "10", "--trials", "200"]));
    assert_eq!(small["results"]["exploratory"], true);
    assert_eq!(small["results"]["experiment"]["precondition_met"], false);

    let measured = json(&qrg(&["sparsify", path(&referee("measured_bits_equal.ref")), "--trials", "500"]));
    assert_eq!(measured["results"]["experiment"]["within_target"], true);
}

#[test]
fn predicate_certificates() {
    let r = json(&qrg(&["predicate", path(&referee("always_reject.ref")), "--tuple", "0,1,1"]));
    let c = &r["results"]["certificate"];
    assert_eq!(c["accept"], false);
    assert!(c["k_value"].as_str().unwrap().starts_with('-'));
    // K = N²(1 − 6) for T = I, m = 1, r = 0.
    assert_eq!(c["k_value"], "-45");

    let r = json(&qrg(&["predicate", path(&referee("always_accept.ref")), "--exists", "--N", "3"]));
    assert_eq!(r["results"]["decision"]["accept"], true);
    let bad = qrg(&["predicate", path(&referee("always_accept.ref")), "--tuple", "0,2"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn gap_check_suite() {
    let r = json(&qrg(&["gap-check", "--suite", "default"]));
    let res = &r["results"];
    assert_eq!(res["passed"], true);
    for c in res["checks"].as_array().unwrap() {
        assert_eq!(c["mismatches"], 0, "{c}");
    }
    let names: Vec<&str> = res["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["pairing", "exponential-sum", "polynomial-product", "matrix-product", "circuit-amplitude"]);
}

#[test]
fn tailbound_iid_against_binomial() {
    let r = json(&qrg(&[
        "tailbound", "--process", "iid", "--gamma", "0.25", "--epsilon", "0.0833", "--n", "144", "--trials", "20000",
    ]));
    let e = &r["results"]["experiment"];
    let bound = (-2.0 * 144.0 * 0.0833f64 * 0.0833).exp();
    assert!((e["bound"].as_f64().unwrap() - bound).abs() < 1e-15);
    assert!((bound - 0.1353).abs() < 1e-3);
    let exact = e["exact_tail"].as_f64().unwrap();
    assert!(exact < bound);
    assert_eq!(e["within_bound"], true);

    let r = json(&qrg(&["tailbound", "--process", "referee", "--referee", path(&referee("equal_or_coin.ref")), "--trials", "2000"]));
    assert_eq!(r["inputs"].as_array().unwrap().len(), 1);
    assert_eq!(r["results"]["experiment"]["within_bound"], true);
    assert_eq!(qrg(&["tailbound", "--process", "referee"]).status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_and_seeded() {
    let be = referee("bits_equal.ref");
    let args = ["sparsify", path(&be), "--trials", "300"];
    let a = qrg(&args);
    let b = qrg(&args);
    assert_eq!(a.stdout, b.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_qrg")).args(args).env("QRG_SEED", "99").output().unwrap();
    let r = json(&env);
    assert_eq!(r["seed"], 99);
    let flag = json(&qrg(&["sparsify", path(&be), "--trials", "300", "--seed", "99"]));
    assert_eq!(r, flag);
}

#[test]
fn out_file_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("report.json");
    let out = qrg(&["value", path(&referee("bits_equal.ref")), "--out", path(&f), "--timing"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("value 0.5"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert!(r["wall_time"].as_f64().unwrap() >= 0.0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
