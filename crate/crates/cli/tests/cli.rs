use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use ssr_core::group::{make_group, Representation};
use ssr_core::io::{GroupSpec, StateSpec};
use ssr_core::linalg::DensityOperator;

fn ssr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssr")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn body(out: &Output) -> Value {
    let mut v = json(out);
    v.as_object_mut().unwrap().remove("timings");
    v
}

fn q(v: &Value, key: &str) -> f64 {
    v["quantities"][key].as_f64().unwrap_or_else(|| panic!("missing {key}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn spin_plus_single_site() {
    let out = ssr(&["resources", "--state", "spin-plus"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((q(&v, "W") - 1.0).abs() < 1e-9);
    assert!(q(&v, "W_G").abs() < 1e-9);
    assert!((q(&v, "A_G") - 1.0).abs() < 1e-9);
}

#[test]
fn refbit_resources_and_triality() {
    let out = ssr(&["resources", "--state", "refbit"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((q(&v, "A_sh") - 1.0).abs() < 1e-9);
    assert!((q(&v, "W_G") - 2.0).abs() < 1e-9);
    let triality =
        v["checks"].as_array().unwrap().iter().find(|c| c["name"].as_str().unwrap().starts_with("triality")).unwrap();
    assert_eq!(triality["pass"], Value::Bool(true));
}

#[test]
fn maximally_mixed_has_no_work() {
    let dir = tempfile::tempdir().unwrap();
    let spec = StateSpec::matrix(&DensityOperator::maximally_mixed(vec![2, 2]));
    let path = write(dir.path(), "mixed.json", &serde_json::to_string(&spec).unwrap());
    let out = ssr(&["resources", "--state", &path, "--charges", "0,1/0,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    for k in ["W", "W_G", "W_GxG"] {
        assert!(q(&v, k).abs() < 1e-9, "{k}");
    }
}

#[test]
fn symmetric_builder_against_group_file() {
    let dir = tempfile::tempdir().unwrap();
    let s3 = make_group("S3").unwrap();
    let regular = Representation::regular(std::sync::Arc::new(s3.clone()));
    let rep = regular.tensor(&regular).unwrap();
    let group = write(dir.path(), "s3.json", &serde_json::to_string(&GroupSpec::from_group(&s3, Some(&rep))).unwrap());
    let state = write(
        dir.path(),
        "psi.json",
        r#"{"format_version": 1, "kind": "builder", "payload": {"name": "symmetric", "beta": 0,
            "terms": [{"mu": 0, "m": 0, "mbar": 0, "d": [1, 0]}, {"mu": 2, "m": 1, "mbar": 0, "d": [0, 1]}]}}"#,
    );
    let out = ssr(&["resources", "--state", &state, "--group", &group]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    // trivial and standard irreps with equal weight
    assert!((q(&v, "H_ch") - 1.0).abs() < 1e-9);
    assert!((q(&v, "H_co") - 0.5).abs() < 1e-9);
}

#[test]
fn decompose_s3_regular() {
    let out = ssr(&["decompose", "--group", "S3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let dims: Vec<u64> = v["details"]["block_dims"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 1, 2, 2]);
}

#[test]
fn decompose_z4_pairs() {
    let v = json(&ssr(&["decompose", "--group", "Z4"]));
    for p in v["details"]["conjugate_pairs"].as_array().unwrap() {
        let (beta, mu, mu_bar) =
            (p["beta"].as_u64().unwrap(), p["mu"].as_u64().unwrap(), p["mu_bar"].as_u64().unwrap());
        assert_eq!(mu_bar, (beta + 4 - mu) % 4);
    }
}

#[test]
fn corrupted_group_names_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = GroupSpec::from_group(&make_group("Z3").unwrap(), None);
    spec.irreps[1].matrices[2][0][0] = [0.2, 0.1];
    let path = write(dir.path(), "bad.json", &serde_json::to_string(&spec).unwrap());
    let out = ssr(&["decompose", "--group", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not unitary"));
}

#[test]
fn parse_and_io_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"format_version\": 1,");
    assert_eq!(ssr(&["decompose", "--group", &broken]).status.code(), Some(3));
    let mut v = serde_json::to_value(GroupSpec::from_group(&make_group("Z2").unwrap(), None)).unwrap();
    v["extra"] = Value::from(0);
    let unknown = write(dir.path(), "unknown.json", &v.to_string());
    assert_eq!(ssr(&["decompose", "--group", &unknown]).status.code(), Some(3));
    assert_eq!(ssr(&["decompose", "--group", "missing/nowhere.json"]).status.code(), Some(3));
    assert_eq!(ssr(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(
        ssr(&["resources", "--state", "spin-plus", "--out", "/nonexistent/dir/out.json"]).status.code(),
        Some(3)
    );
}

#[test]
fn validation_failures_exit_1() {
    assert_eq!(ssr(&["decompose", "--group", "Z99"]).status.code(), Some(1));
    assert_eq!(ssr(&["resources", "--state", "spin-plus", "--charges", "0,1,2"]).status.code(), Some(1));
    assert_eq!(ssr(&["verify", "identities", "--trials", "0"]).status.code(), Some(1));
}

#[test]
fn check_failure_exits_2() {
    let out = ssr(&["verify", "identities", "--group", "Z2", "--trials", "3", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["pass"], Value::Bool(false));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "identities", "--group", "S3", "--trials", "20", "--seed", "7"];
    let (a, b) = (ssr(&args), ssr(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(serde_json::to_string(&body(&a)).unwrap(), serde_json::to_string(&body(&b)).unwrap());
    let c = ssr(&["verify", "identities", "--group", "S3", "--trials", "20", "--seed", "8"]);
    assert_ne!(serde_json::to_string(&body(&a)).unwrap(), serde_json::to_string(&body(&c)).unwrap());
}

#[test]
fn verify_theorem2_achievability() {
    let out = ssr(&["verify", "theorem2", "--group", "Z2,Z3,S3", "--trials", "30", "--achievability"]);
    assert_eq!(out.status.code(), Some(0));
    let suites = json(&out)["suites"].as_array().unwrap().clone();
    assert!(suites.iter().any(|s| s["name"] == "theorem2-achievability" && s["pass"] == Value::Bool(true)));
}

#[test]
fn verify_appendix_z4() {
    let out = ssr(&["verify", "appendix", "--group", "Z4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for c in v["suites"][0]["summary"].as_array().unwrap() {
        assert!(c["worst_margin"].as_f64().unwrap().abs() <= 1e-10);
    }
}

#[test]
fn reproduce_paper_and_output_options() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ssr(&["reproduce-paper", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
    let rows = v["details"]["rows"].as_array().unwrap();
    let row = |name: &str| rows.iter().find(|r| r["name"] == name).unwrap()["expected"].as_f64().unwrap();
    assert_eq!(row("W_U(|+>|+>)"), 0.5);
    assert_eq!(row("A_U(|+>|+>)"), 1.5);
    assert_eq!(row("refbit A_sh"), 1.0);
    let table = ssr(&["reproduce-paper", "--format", "table"]);
    assert!(String::from_utf8_lossy(&table.stdout).starts_with("ssr reproduce-paper [PASS]"));
}

#[test]
fn amplitude_file_is_analyzed_when_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let state = write(
        dir.path(),
        "rb.json",
        &format!(
            r#"{{"format_version": 1, "dims": [2, 2], "kind": "amplitudes", "payload": [[0, 0], [{h}, 0], [{h}, 0], [0, 0]]}}"#
        ),
    );
    let v = json(&ssr(&["resources", "--state", &state, "--charges", "0,1/0,1"]));
    assert!((q(&v, "W_GxG-L") - 1.0).abs() < 1e-9);
    assert!(q(&v, "E_GxG").abs() < 1e-9);
    let plus = json(&ssr(&["resources", "--state", "spin-plus-2"]));
    assert!(plus["quantities"].get("E_GxG").is_none());
    assert!(!plus["notes"].as_array().unwrap().is_empty());
}
