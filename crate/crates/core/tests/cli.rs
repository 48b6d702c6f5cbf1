use std::process::{Command, Output};

use serde_json::Value;

fn overlap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_overlap"))
        .args(args)
        .env_remove("OVERLAP_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = overlap(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn dist_exact_uniform_binary() {
    let v = json(&["dist", "--n", "4", "--uniform", "2", "--exact"]);
    assert_eq!(v["pmf"], serde_json::json!(["3/8", "3/8", "1/8", "1/8"]));
    assert_eq!(v["producer"], "enumeration");
    assert_eq!(v["theta"]["probs"], serde_json::json!([0.5, 0.5]));
    assert_eq!(v["manifest"]["command"], "dist");
    assert_eq!(v["manifest"]["mode"], "exact-rational");
}

#[test]
fn dist_exact_two_letter_both_methods() {
    for method in ["enumeration", "decomposition"] {
        let v = json(&["dist", "--n", "2", "--theta", "0.7,0.3", "--exact", "--method", method]);
        assert_eq!(v["pmf"], serde_json::json!(["21/50", "29/50"]), "{method}");
    }
    let a = json(&["dist", "--n", "9", "--theta", "0.7,0.3", "--exact"]);
    let b = json(&[
        "dist",
        "--n",
        "9",
        "--theta",
        "0.7,0.3",
        "--exact",
        "--method",
        "decomposition",
    ]);
    assert_eq!(a["pmf"], b["pmf"]);
}

#[test]
fn exact_output_is_byte_identical() {
    let args = ["dist", "--n", "10", "--uniform", "3", "--exact"];
    assert_eq!(overlap(&args).stdout, overlap(&args).stdout);
}

#[test]
fn mc_output_depends_on_seed_only() {
    let base = [
        "dist",
        "--n",
        "24",
        "--uniform",
        "2",
        "--mc",
        "--samples",
        "20000",
        "--seed",
        "1",
    ];
    let one = overlap(&[&base[..], &["--threads", "1"]].concat()).stdout;
    let again = overlap(&[&base[..], &["--threads", "1"]].concat()).stdout;
    assert_eq!(one, again);
    let a: Value = serde_json::from_slice(&one).unwrap();
    let b = json(&[&base[..], &["--threads", "2"]].concat());
    assert_eq!(a["counts"], b["counts"]);
    assert_eq!(a["manifest"]["seed"], 1);
}

#[test]
fn csv_has_header_and_rows() {
    let out = overlap(&["dist", "--n", "4", "--uniform", "2", "--exact", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,probability");
    assert_eq!(lines.len(), 5);
    let out = overlap(&["limit", "--k-max", "3", "--uniform", "3", "--tol", "1e-6", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,limit_pmf,tail_bound\n0,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(overlap(&["dist", "--n", "4"]).status.code(), Some(2));
    assert_eq!(
        overlap(&["dist", "--n", "4", "--exact", "--theta", "0.5,0.2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        overlap(&["dist", "--n", "4", "--exact", "--geometric", "0.5", "--rational"])
            .status
            .code(),
        Some(2)
    );
    let out = overlap(&["dist", "--n", "30", "--uniform", "2", "--exact"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    assert_eq!(
        overlap(&["count", "--n-max", "6", "--budget", "10"]).status.code(),
        Some(0)
    );
}

#[test]
fn count_and_zero() {
    let v = json(&["count", "--n-max", "6"]);
    assert_eq!(v["counts"], serde_json::json!(["2", "2", "4", "6", "12", "20"]));
    let v = json(&["zero", "--n-max", "4", "--uniform", "2"]);
    assert_eq!(v["p_zero"], serde_json::json!(["1", "1/2", "1/2", "3/8"]));
    assert_eq!(v["limit"]["strictly_above"], true);
}

#[test]
fn limit_rows_are_flagged_when_tolerance_is_out_of_reach() {
    let out = overlap(&[
        "limit", "--k-max", "1", "--theta", "0.7,0.3", "--tol", "1e-15", "--budget", "100000",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"][0]["pmf"]["flagged"], true);
}

#[test]
fn verify_writes_json_and_markdown() {
    let dir = std::env::temp_dir().join(format!("overlap-verify-{}", std::process::id()));
    let out = overlap(&["verify", "--quick", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("verify.json")).unwrap()).unwrap();
    assert!(report["checks"].as_array().unwrap().len() > 20);
    let md = std::fs::read_to_string(dir.join("verify.md")).unwrap();
    assert!(md.contains("| unbordered-counts | Holds | Pass |"));
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(overlap(&["verify", "--quick", "--strict"]).status.code(), Some(4));
}

#[test]
fn bounds_report_on_small_grid() {
    let v = json(&["bounds", "--grid", "4..8", "--k-max", "4", "--uniform", "3"]);
    assert!(v["max_ratio_pmf"].as_f64().unwrap() < 1.0);
    assert_eq!(v["lead"]["rows"].as_array().unwrap().len(), 4);
    assert_eq!(overlap(&["bounds", "--grid", "9..4"]).status.code(), Some(2));
}
