use std::process::{Command, Output};

fn treerep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treerep")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = treerep(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn thresholds_match_golden() {
    assert_eq!(stdout(&["thresholds", "--n", "3..8"]), include_str!("golden/thresholds_3_8.csv"));
}

#[test]
fn scan_matches_golden_and_is_repeatable() {
    let args = ["scan", "--tree", "spider:3x1", "--r", "0.25:0.75:0.25", "--p", "0.1,0.9"];
    let first = stdout(&args);
    assert_eq!(first, include_str!("golden/scan_star3.csv"));
    assert_eq!(first, stdout(&args));
}

#[test]
fn deriv_check_matches_golden() {
    let got = stdout(&["deriv-check", "--tree", "path:2", "--set", "0,1", "--at", "p1", "--multiset", "0-1", "--r", "1/2"]);
    assert_eq!(got, include_str!("golden/deriv_path2_p1.json"));
}

#[test]
fn csv_outputs_end_with_a_metadata_line() {
    for args in [&["thresholds", "--n", "4"][..], &["scan", "--tree", "path:3", "--r", "0.5", "--p", "0.5"][..]] {
        let body = stdout(args);
        let last = body.lines().last().unwrap();
        assert!(last.starts_with(&format!("# treerep {} config=", env!("CARGO_PKG_VERSION"))), "{last}");
        assert_eq!(last.split("config=").nth(1).unwrap().len(), 64);
    }
    assert_ne!(
        stdout(&["thresholds", "--n", "4"]).lines().last(),
        stdout(&["thresholds", "--n", "5"]).lines().last()
    );
}

#[test]
fn expectation_sets_the_exit_status() {
    let ok = treerep(&["analyze", "--tree", "path:5", "--r", "0.45", "--p", "0.01", "--expect", "representable"]);
    assert_eq!(ok.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(json["verdict"]["representable"], true);
    assert_eq!(json["entries"].as_array().unwrap().len(), 31);

    let neg = treerep(&["analyze", "--tree", "octopus:3x2", "--r", "0.45", "--p", "0.95", "--expect", "representable"]);
    assert_eq!(neg.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&neg.stdout).unwrap();
    assert_eq!(json["verdict"]["witness"], serde_json::json!([0, 1, 3, 5]));
    assert_eq!(json["witness_entry"]["sign"], "-");

    let flipped = treerep(&["analyze", "--tree", "octopus:3x2", "--r", "0.45", "--p", "0.95", "--expect", "not-representable"]);
    assert_eq!(flipped.status.code(), Some(0));
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    assert_eq!(treerep(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(treerep(&["analyze", "--tree", "path:3", "--r", "3/2"]).status.code(), Some(2));
    assert_eq!(treerep(&["analyze", "--tree", "nonsense:3"]).status.code(), Some(2));
    assert_eq!(treerep(&["scan", "--tree", "path:3", "--r", "0.5", "--p", "1"]).status.code(), Some(2));
    assert_eq!(treerep(&["analyze", "--tree", "path:3", "--unknown-flag"]).status.code(), Some(2));
}

#[test]
fn connected_only_lists_connected_sets() {
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["analyze", "--tree", "star:3", "--connected-only"])).unwrap();
    let sets = json["entries"].as_array().unwrap();
    assert_eq!(sets.len(), 4 + 3 + 3 + 1);
}

#[test]
fn verify_is_deterministic_across_thread_counts() {
    let args = ["verify", "--tree", "path:3", "--draws", "40000", "--seed", "5"];
    let a = stdout(&args);
    let mut single = args.to_vec();
    single.extend(["--threads", "1"]);
    assert_eq!(a, stdout(&single));
    let json: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(json["passed"], true);
}

#[test]
fn params_file_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.json");
    std::fs::write(&params, r#"{"r": {"0": "1/2", "1": "1/3", "2": 0.25}, "p": {"0-1": "1/5", "1-2": 0.5}}"#).unwrap();
    let out = dir.path().join("analysis.json");
    let status = treerep(&[
        "analyze",
        "--tree",
        "path:3",
        "--params",
        params.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["verdict"]["representable"], true);
}

#[test]
fn scaling_check_reports_the_contracted_parameter() {
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["scaling-check", "--tree", "path:3", "--r", "1/2", "--p", "1/2", "--k", "2"])).unwrap();
    assert_eq!(json["p_prime"], "3/4");
    assert_eq!(json["equal"], true);
}
