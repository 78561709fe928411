use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rao(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rao"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout holds one JSON report")
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("the schema compiles")
}

fn assert_valid(v: &Value) {
    let validator = validator();
    let errors: Vec<String> = validator
        .iter_errors(v)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn theorem1_default_group_passes() {
    let out = rao(&["verify-theorem1", "--trials", "40", "--seed", "3"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert_valid(&r);
    assert_eq!(r["body"]["round_trip"]["passed"], 40);
    assert_eq!(r["body"]["adversarial"]["passed"], 40);
    assert_eq!(r["body"]["config"]["group"], "7");
}

#[test]
fn theorem1_expected_negative_mode() {
    let out = rao(&[
        "verify-theorem1",
        "--group",
        "6",
        "--coeffs",
        "1,3,5",
        "--trials",
        "5",
        "--expect-negative",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_valid(&r);
    assert_eq!(
        r["body"]["round_trip"]["verdicts"]["preconditions-violated"],
        5
    );

    // the same coefficients without the flag are a trial failure
    let out = rao(&[
        "verify-theorem1",
        "--group",
        "6",
        "--coeffs",
        "1,3,5",
        "--trials",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_valid(&report(&out));
}

#[test]
fn theorem1_config_errors() {
    for args in [
        vec!["verify-theorem1", "--group", "4y3"],
        vec!["verify-theorem1", "--group", "0"],
        vec!["verify-theorem1", "--form", "iii"],
        vec!["verify-theorem1", "--coeffs", "1,2"],
        vec!["verify-theorem1", "--trials", "0"],
        vec![
            "verify-theorem1",
            "--form",
            "kotlarski",
            "--coeffs",
            "0,1,1",
        ],
        vec!["verify-theorem1", "--bogus"],
    ] {
        let out = rao(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn theorem2_default_lattice() {
    let out = rao(&["verify-theorem2", "--trials", "2"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert_valid(&r);
    let trial = &r["body"]["trials"][0];
    assert_eq!(trial["planted_sigmas"].as_array().unwrap().len(), 4);
    assert!(trial["max_sigma_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["body"]["window"], "[-60, 60]/30");
}

#[test]
fn theorem2_margin_is_a_config_error() {
    let out = rao(&["verify-theorem2", "--radius", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window too small"));
}

#[test]
fn reports_are_reproducible() {
    for args in [
        vec![
            "verify-theorem1",
            "--group",
            "4x3",
            "--form",
            "ii",
            "--trials",
            "12",
            "--seed",
            "9",
        ],
        vec!["verify-theorem2", "--trials", "2", "--seed", "4"],
        vec!["counterexample", "remark3", "--seed", "2"],
    ] {
        let a = report(&rao(&args));
        let b = report(&rao(&args));
        assert_eq!(
            serde_json::to_string(&a["body"]).unwrap(),
            serde_json::to_string(&b["body"]).unwrap(),
            "{args:?}"
        );
    }
}

#[test]
fn remark3_writes_readable_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let fixtures = dir.path().join("fx");
    let out = rao(&[
        "counterexample",
        "remark3",
        "--fixtures",
        fixtures.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_valid(&r);
    assert!(r["body"]["joint_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["body"]["fixtures"].as_array().unwrap().len(), 6);
    for name in ["mu1.dist", "nu1.dist", "mu3.dist", "nu3.dist"] {
        let text = std::fs::read_to_string(fixtures.join(name)).unwrap();
        let mu = rao_core::fixture::read_dist(&text).unwrap();
        assert_eq!(mu.group().label(), "6");
    }
}

#[test]
fn counterexample_certificates() {
    for (construction, field) in [
        ("remark3-kernel-b3", "kernel_factor_residual"),
        ("remark6", "identical_joint_exponents"),
        ("bernstein", "bernstein_holds"),
    ] {
        let out = rao(&["counterexample", construction]);
        assert_eq!(out.status.code(), Some(0), "{construction}");
        let r = report(&out);
        assert_valid(&r);
        assert_eq!(r["body"]["passed"], true);
        assert!(!r["body"][field].is_null());
    }
    let out = rao(&["counterexample", "remark3", "--group", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let out = rao(&["counterexample", "bernstein", "--group", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lemma_suite_exit_codes() {
    let out = rao(&["lemma-suite", "--family", "2,3,4,2x4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid(&report(&out));

    let out = rao(&[
        "lemma-suite",
        "--family",
        "2,3,4,2x4",
        "--inject-fault",
        "adjoint",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("adjoint-identity"), "{stderr}");
    let r = report(&out);
    assert_valid(&r);
    assert_eq!(r["body"]["inject_fault"], "adjoint");

    assert_eq!(rao(&["lemma-suite", "--family", ""]).status.code(), Some(2));
    assert_eq!(
        rao(&["lemma-suite", "--inject-fault", "pairing"])
            .status
            .code(),
        Some(2)
    );
}
