use std::process::Command;

use serde_json::Value;
use torsionlab_cli::{run, EXIT_CONSTRAINT, EXIT_OK, EXIT_PRECISION, EXIT_USAGE};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn json_run(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["torsionlab", "--json"];
    argv.extend_from_slice(args);
    let out = run(argv);
    assert_eq!(out.code, EXIT_OK, "{args:?}: {}", out.stderr);
    (out.code, serde_json::from_str(&out.stdout).expect("valid JSON"))
}

#[test]
fn polydisk_disk_times_polydisk_reports_s() {
    let (_, r) = json_run(&["polydisk", "--mode", "1.4", "--n", "3", "--S", "2"]);
    assert_eq!(r["bound"], "2");
    assert_eq!(r["certified"], true);
    assert_eq!(r["fiber"], serde_json::json!(["3/4", "2", "2"]));
    assert!(r["constraints"].as_array().unwrap().iter().all(|c| c["ok"] == true));
    assert_eq!(r["provenance"], "exact");
}

#[test]
fn equator_is_non_displaceable() {
    let (_, r) = json_run(&["torsion", "--model", "sphere:1", "--fiber", "1/2"]);
    assert_eq!(r["non_displaceable"], true);
    assert_eq!(r["verdict"], "non-displaceable");
    assert_eq!(r["threshold"], "inf");
    assert_eq!(r["betti"], 2);
}

#[test]
fn energy_suite_passes_for_seed_7() {
    let (_, r) = json_run(&["verify", "--suite", "energy", "--seed", "7"]);
    assert_eq!(r["pass"], true);
    assert_eq!(r["cases"], 50);
    assert!(r["max_discrepancy"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["provenance"], "quadrature(1e-6)");
}

#[test]
fn reports_are_byte_identical() {
    let argv = ["torsionlab", "--json", "torsion", "--model", "sphere:3/2*sphere:5*sphere:5", "--fiber", "3/4,2,2"];
    assert_eq!(run(argv), run(argv));
    let argv = ["torsionlab", "verify", "--suite", "hat", "--seed", "11", "--cases", "5"];
    let first = run(argv);
    assert_eq!(first.code, EXIT_OK);
    assert_eq!(first, run(argv));
}

#[test]
fn seed_defaults_to_environment() {
    let bin = env!("CARGO_BIN_EXE_torsionlab");
    let with_env = Command::new(bin)
        .args(["--json", "verify", "--suite", "hofer", "--cases", "3"])
        .env("TORSIONLAB_SEED", "5")
        .output()
        .unwrap();
    let explicit = Command::new(bin)
        .args(["--json", "verify", "--suite", "hofer", "--cases", "3", "--seed", "5"])
        .env_remove("TORSIONLAB_SEED")
        .output()
        .unwrap();
    assert!(with_env.status.success());
    assert_eq!(with_env.stdout, explicit.stdout);
}

#[test]
fn polydisk_fiber_counts_intersections() {
    let (_, r) = json_run(&[
        "torsion",
        "--model",
        "sphere:3/2*sphere:5*sphere:5",
        "--fiber",
        "3/4,2,2",
        "--hofer",
        "3",
    ]);
    assert_eq!(r["threshold"], "2");
    assert_eq!(r["betti"], 0);
    assert_eq!(r["intersection_bound"], 0);
    assert_eq!(r["w"][0], "0");
}

#[test]
fn model_files_and_shorthand_agree() {
    let (_, a) = json_run(&["torsion", "--model", &data("model.json"), "--fiber", "3/4,1/2"]);
    let (_, b) = json_run(&["torsion", "--model", "cylinder*sphere:1", "--fiber", "3/4,1/2"]);
    assert_eq!(a["threshold"], "3/4");
    for key in ["betti", "torsion", "threshold", "facet_areas", "w"] {
        assert_eq!(a[key], b[key], "{key}");
    }
}

#[test]
fn snf_and_decompose_files() {
    let (_, r) = json_run(&["snf", "--matrix", &data("matrix.json")]);
    assert_eq!(r["pivots"], serde_json::json!(["1", "2"]));
    assert_eq!(r["d"], serde_json::json!([["T(1)", "0"], ["0", "T(2)"]]));
    let (_, r) = json_run(&["decompose", "--complex", &data("complex.json"), "--degree", "1"]);
    assert_eq!(r["betti"], 0);
    assert_eq!(r["torsion"], serde_json::json!(["3/2"]));
    assert_eq!(r["threshold"], "3/2");
    let (_, r) = json_run(&["--trunc", "4", "snf", "--matrix", &data("nonmonomial.json")]);
    assert_eq!(r["pivots"], serde_json::json!(["1"]));
}

#[test]
fn optimize_finds_the_equator() {
    let (_, r) = json_run(&["optimize", "--model", "sphere:1", "--resolution", "4"]);
    assert_eq!(r["fiber"], serde_json::json!(["1/2"]));
    assert_eq!(r["threshold"], "inf");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| {
        let mut argv = vec!["torsionlab"];
        argv.extend_from_slice(args);
        run(argv).code
    };
    assert_eq!(code(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(code(&["torsion", "--model", "sphere:1", "--fiber", "abc"]), EXIT_USAGE);
    assert_eq!(code(&["polydisk", "--mode", "1.4", "--n", "3", "--S", "2", "--lambda", "3"]), EXIT_CONSTRAINT);
    assert_eq!(code(&["torsion", "--model", "sphere:1", "--fiber", "1"]), EXIT_CONSTRAINT);
    assert_eq!(code(&["decompose", "--complex", &data("not_a_complex.json")]), EXIT_CONSTRAINT);
    assert_eq!(code(&["snf", "--matrix", &data("nonmonomial.json")]), EXIT_PRECISION);
    assert_eq!(code(&["--help"]), EXIT_OK);

    let status = Command::new(env!("CARGO_BIN_EXE_torsionlab"))
        .args(["snf", "--matrix", &data("nonmonomial.json")])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_PRECISION));
    assert!(String::from_utf8_lossy(&status.stderr).starts_with("error: precision exhausted"));
}
