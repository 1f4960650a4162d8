//! End-to-end tests driving the `openimage` binary: JSON in, JSON out,
//! exit code 0 / 1 / 2 for success / falsified / usage.

use serde_json::Value;
use std::io::Write;
use std::process::{Command, Stdio};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str], stdin: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_openimage"));
    cmd.args(args).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.stdin(if stdin.is_some() { Stdio::piped() } else { Stdio::null() });
    let mut child = cmd.spawn().expect("spawn openimage");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    let out = child.wait_with_output().expect("wait for openimage");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("stdout is JSON")
}

fn tmp_path(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("openimage-cli-{}-{name}", std::process::id()))
}

// ---------------------------------------------------------------------------
// bounds

#[test]
fn bounds_two_height_zero_curves() {
    let r = run(&["bounds"], Some(r#"{"n_curves": 2, "k_degree": 1, "heights": [0.0, 0.0]}"#));
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc = json(&r.stdout);
    assert_eq!(doc["implication_holds"], Value::Bool(true));
    assert_eq!(doc["constants"]["gamma"].as_u64(), Some(10_000_000_000_000));
    let factor = doc["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["name"] == "delta_power_factor")
        .expect("delta_power_factor bound present");
    assert_eq!(factor["value"]["tier"], "loglog10");
    let v = factor["value"]["value_f64"].as_f64().unwrap();
    assert!((v - 70683.446630895).abs() < 1e-6, "got {v}");
    assert!(doc["bounds"].as_array().unwrap().iter().any(|b| b["name"] == "main_index"));
}

#[test]
fn bounds_missing_field_is_usage_error() {
    let r = run(&["bounds"], Some(r#"{"n_curves": 2, "heights": [0.0, 0.0]}"#));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("k_degree"), "stderr should name the field: {}", r.stderr);
}

#[test]
fn bounds_rejects_single_curve() {
    let r = run(&["bounds"], Some(r#"{"n_curves": 1, "k_degree": 1, "heights": [0.0]}"#));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("two curves"), "stderr: {}", r.stderr);
}

// ---------------------------------------------------------------------------
// lie

const DIAGONAL_MOD_9: &str = r#"{"ell": 3, "N": 2, "n": 2, "generators":
    [[[1,1,0,1],[1,1,0,1]], [[0,8,1,0],[0,8,1,0]]]}"#;

#[test]
fn lie_diagonal_group_is_a_graph() {
    let r = run(&["lie"], Some(DIAGONAL_MOD_9));
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc = json(&r.stdout);
    assert_eq!(doc["group_order"].as_u64(), Some(648));
    assert_eq!(doc["rank"].as_u64(), Some(3));
    assert_eq!(doc["kernel_rank"].as_u64(), Some(0));
    // A zero kernel is a graph all the way down to the working precision.
    assert_eq!(doc["graph_defect_depth"].as_u64(), Some(2));
}

#[test]
fn lie_reports_planted_kernel_depth() {
    // Diagonal copy of SL2(Z/9) plus the depth-1 ball in the second block.
    let spec = r#"{"ell": 3, "N": 2, "n": 2, "generators":
        [[[1,1,0,1],[1,1,0,1]], [[0,8,1,0],[0,8,1,0]],
         [[1,0,0,1],[1,3,0,1]], [[1,0,0,1],[1,0,3,1]], [[1,0,0,1],[4,0,0,7]]]}"#;
    let path = tmp_path("planted.json");
    std::fs::write(&path, spec).unwrap();
    let r = run(&["lie", "--input", path.to_str().unwrap()], None);
    std::fs::remove_file(&path).ok();
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc = json(&r.stdout);
    assert_eq!(doc["group_order"].as_u64(), Some(17496));
    assert_eq!(doc["kernel_rank"].as_u64(), Some(3));
    assert_eq!(doc["kernel_min_valuation"].as_u64(), Some(1));
    assert_eq!(doc["graph_defect_depth"].as_u64(), Some(1));
}

#[test]
fn lie_empty_generators_give_trivial_group() {
    let r = run(&["lie"], Some(r#"{"ell": 3, "N": 2, "n": 1, "generators": []}"#));
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc = json(&r.stdout);
    assert_eq!(doc["group_order"].as_u64(), Some(1));
    assert_eq!(doc["rank"].as_u64(), Some(0));
    assert_eq!(doc["kernel_rank"], Value::Null);
    assert_eq!(doc["special_basis"], Value::Null);
}

#[test]
fn lie_prime_flag_mismatch_is_usage_error() {
    let r = run(&["lie", "--prime", "5"], Some(DIAGONAL_MOD_9));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("prime 3"), "stderr: {}", r.stderr);
}

// ---------------------------------------------------------------------------
// inner

#[test]
fn inner_exact_conjugation_certifies() {
    // Images of the depth-1 scaled basis under conjugation by [[1,1],[0,1]].
    let spec = r#"{"ell": 5, "N": 18, "s": 1, "n": 17,
        "domain": [[5,0,0],[0,5,0],[0,0,5]],
        "images": [[5,0,0],[-10,5,0],[-5,5,5]]}"#;
    let r = run(&["inner"], Some(spec));
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc = json(&r.stdout);
    assert_eq!(doc["certificate"]["alpha"].as_u64(), Some(1));
    assert_eq!(doc["certificate"]["certified_precision"].as_u64(), Some(4));
    assert_eq!(doc["bracket_defect_ok"], Value::Bool(true));
    assert_eq!(doc["intertwines_at_certified_depth"], Value::Bool(true));
    assert_eq!(doc["trace_congruence_ok"], Value::Bool(true));
}

#[test]
fn inner_low_quality_is_rejected() {
    let spec = r#"{"ell": 5, "N": 18, "s": 1, "n": 2,
        "domain": [[5,0,0],[0,5,0],[0,0,5]],
        "images": [[5,0,0],[0,5,0],[0,0,-5]]}"#;
    let r = run(&["inner"], Some(spec));
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("quality"), "stderr: {}", r.stderr);
}

// ---------------------------------------------------------------------------
// goursat

#[test]
fn goursat_two_blocks_depth_two() {
    let r = run(&["goursat"], Some(r#"{"ell": 2, "n": 2, "s_matrix": [[0,2],[2,0]]}"#));
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc = json(&r.stdout);
    assert_eq!(doc["exponents"], serde_json::json!([2, 2]));
    assert_eq!(doc["index_bound"], Value::Null);
}

#[test]
fn goursat_depth_one_at_two_is_usage_error() {
    let r = run(&["goursat"], Some(r#"{"ell": 2, "n": 2, "s_matrix": [[0,1],[1,0]]}"#));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("side condition"), "stderr: {}", r.stderr);
}

// ---------------------------------------------------------------------------
// verify

#[test]
fn verify_hensel_suite_passes() {
    let r = run(&["verify", "--suite", "hensel", "--seed", "42"], None);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc = json(&r.stdout);
    assert_eq!(doc["name"], "hensel_oracle");
    assert_eq!(doc["passed"], Value::Bool(true));
    assert_eq!(doc["trials"].as_u64(), Some(3000));
    assert_eq!(doc["failures"].as_u64(), Some(0));
}

#[test]
fn verify_goursat_suite_runs_twenty_products() {
    let r = run(&["verify", "--suite", "goursat"], None);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let doc = json(&r.stdout);
    assert_eq!(doc["trials"].as_u64(), Some(20));
    assert_eq!(doc["passed"], Value::Bool(true));
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    let r = run(&["verify", "--suite", "nonsense"], None);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("unknown suite"), "stderr: {}", r.stderr);
}

#[test]
fn verify_full_run_reports_red_dominance() {
    let r = run(&["verify", "--seed", "7"], None);
    assert_eq!(r.code, 1, "stderr: {}", r.stderr);
    let doc = json(&r.stdout);
    assert_eq!(doc["all_passed"], Value::Bool(false));
    let suites = doc["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 10);
    let red: Vec<&str> = suites
        .iter()
        .filter(|s| s["passed"] == Value::Bool(false))
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    // The dominance suite documents a known discrepancy in one recorded
    // landmark constant and is expected to stay red; everything else passes.
    assert_eq!(red, ["asymptotic_dominance"]);
}

#[test]
fn verify_output_is_byte_reproducible() {
    let first = run(&["verify", "--suite", "gain", "--seed", "12345"], None);
    assert_eq!(first.code, 0, "stderr: {}", first.stderr);
    let path = tmp_path("gain.json");
    let second = run(
        &["verify", "--suite", "gain", "--seed", "12345", "--output", path.to_str().unwrap()],
        None,
    );
    assert_eq!(second.code, 0);
    assert!(second.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(first.stdout, written, "same seed must produce identical bytes");
}
