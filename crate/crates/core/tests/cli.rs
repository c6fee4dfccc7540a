//! End-to-end checks of the `platoon` binary: subcommands, exit codes,
//! report shapes, and file round-trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn platoon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_platoon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(output: &Output) -> Value {
    let stdout = String::from_utf8_lossy(&output.stdout);
    serde_json::from_str(stdout.trim()).unwrap_or_else(|err| {
        panic!("stdout is not a JSON report: {err}\nstdout: {stdout}");
    })
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn decide_feasible_and_infeasible() {
    let fig1 = fixture("fig1.json");
    let ok = platoon(&["decide", "--instance", fig1.to_str().unwrap(), "--delay", "2"]);
    assert_eq!(exit_code(&ok), 0);
    let body = report(&ok);
    assert_eq!(body["result"], "feasible");
    assert_eq!(body["schedule"]["crossing_times"]["A"], 0);
    assert_eq!(body["schedule"]["crossing_times"]["B"], 3);

    let no = platoon(&["decide", "--instance", fig1.to_str().unwrap(), "--delay", "1"]);
    assert_eq!(exit_code(&no), 1);
    assert_eq!(report(&no)["result"], "infeasible");
}

#[test]
fn decide_algorithm_selection() {
    let fig1 = fixture("fig1.json");
    for algorithm in ["auto", "greedy", "dp"] {
        let out = platoon(&[
            "decide",
            "--instance",
            fig1.to_str().unwrap(),
            "--delay",
            "2",
            "--algorithm",
            algorithm,
        ]);
        assert_eq!(exit_code(&out), 0, "algorithm {algorithm}");
    }
    let bogus = platoon(&[
        "decide",
        "--instance",
        fig1.to_str().unwrap(),
        "--delay",
        "2",
        "--algorithm",
        "magic",
    ]);
    assert_eq!(exit_code(&bogus), 2);
}

#[test]
fn solve_emits_schedule_and_agrees_across_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let long_short = fixture("long_short.json");
    let mut d_stars = Vec::new();
    for strategy in ["hybrid", "bisect", "comparison"] {
        let emitted = dir.path().join(format!("{strategy}.json"));
        let out = platoon(&[
            "solve",
            "--instance",
            long_short.to_str().unwrap(),
            "--strategy",
            strategy,
            "--emit",
            emitted.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0);
        let body = report(&out);
        assert_eq!(body["d_star"], 3);
        d_stars.push(body["d_star"].clone());

        let validate = platoon(&[
            "validate",
            "--instance",
            long_short.to_str().unwrap(),
            "--schedule",
            emitted.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&validate), 0);
        assert_eq!(report(&validate)["max_delay"], 3);
    }
    assert!(d_stars.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"crossing_times": {"A": 0, "B": 2}}"#).unwrap();
    let out = platoon(&[
        "validate",
        "--instance",
        fixture("fig1.json").to_str().unwrap(),
        "--schedule",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    let body = report(&out);
    assert_eq!(body["result"], "invalid");
    assert_eq!(body["violations"][0]["kind"], "cross-collision");
}

#[test]
fn oracle_solves_and_respects_cap() {
    let long_short = fixture("long_short.json");
    let out = platoon(&["oracle", "--instance", long_short.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    let body = report(&out);
    assert_eq!(body["d_star"], 3);
    assert_eq!(body["orders"], 2);

    let capped = platoon(&[
        "oracle",
        "--instance",
        long_short.to_str().unwrap(),
        "--max-orders",
        "1",
    ]);
    assert_eq!(exit_code(&capped), 2);
    assert!(String::from_utf8_lossy(&capped.stderr).contains("exceed"));
}

#[test]
fn reduce_oracle_extract_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("reduced.json");
    let sched = dir.path().join("sched.json");

    let reduced = platoon(&["reduce", "--set", "1,1,2", "--out", inst.to_str().unwrap()]);
    assert_eq!(exit_code(&reduced), 0);
    let body = report(&reduced);
    assert_eq!(body["q"], 2);
    assert_eq!(body["d_max"], 5);

    let solved = platoon(&[
        "oracle",
        "--instance",
        inst.to_str().unwrap(),
        "--emit",
        sched.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&solved), 0);
    assert_eq!(report(&solved)["d_star"], 5);

    let extracted = platoon(&[
        "extract",
        "--instance",
        inst.to_str().unwrap(),
        "--schedule",
        sched.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&extracted), 0);
    let body = report(&extracted);
    assert_eq!(body["result"], "partition");
    assert_eq!(body["u"], serde_json::json!([1, 1]));
    assert_eq!(body["v"], serde_json::json!([2]));
}

#[test]
fn reduce_odd_sum_is_no_partition() {
    let out = platoon(&["reduce", "--set", "1,1,1"]);
    assert_eq!(exit_code(&out), 1);
    assert_eq!(report(&out)["result"], "trivially-no-partition");

    let bad = platoon(&["reduce", "--set", "1,0,2"]);
    assert_eq!(exit_code(&bad), 2);
}

#[test]
fn gen_is_deterministic_and_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = platoon(&[
            "gen",
            "--kind",
            "y-merge",
            "--n",
            "6",
            "--seed",
            "7",
            "--max-release",
            "30",
            "--max-length",
            "5",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0);
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());
    assert_eq!(
        bytes_a,
        std::fs::read(fixture("golden_ymerge_n6_seed7.json")).unwrap(),
        "generator output drifted from the frozen golden file"
    );
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.json");
    let missing_k = platoon(&[
        "gen",
        "--kind",
        "k-merge",
        "--n",
        "3",
        "--seed",
        "1",
        "--max-release",
        "10",
        "--max-length",
        "3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&missing_k), 2);

    let zero_length = platoon(&[
        "gen",
        "--kind",
        "y-merge",
        "--n",
        "3",
        "--seed",
        "1",
        "--max-release",
        "10",
        "--max-length",
        "0",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&zero_length), 2);
}

#[test]
fn multi_cross_is_rejected_by_decide_but_not_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("mc.json");
    let gen = platoon(&[
        "gen",
        "--kind",
        "multi-cross",
        "--k",
        "2",
        "--n",
        "4",
        "--seed",
        "3",
        "--max-release",
        "10",
        "--max-length",
        "3",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&gen), 0);

    let decide = platoon(&["decide", "--instance", inst.to_str().unwrap(), "--delay", "5"]);
    assert_eq!(exit_code(&decide), 2);

    let solve = platoon(&["solve", "--instance", inst.to_str().unwrap()]);
    assert_eq!(exit_code(&solve), 2);

    let oracle = platoon(&["oracle", "--instance", inst.to_str().unwrap()]);
    assert_eq!(exit_code(&oracle), 0);
}

#[test]
fn io_errors_exit_two() {
    let missing = platoon(&["solve", "--instance", "/nonexistent/file.json"]);
    assert_eq!(exit_code(&missing), 2);

    let dir = tempfile::tempdir().unwrap();
    let garbled = dir.path().join("garbled.json");
    std::fs::write(&garbled, "{").unwrap();
    let out = platoon(&["solve", "--instance", garbled.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    let usage = platoon(&["decide", "--delay", "2"]);
    assert_eq!(exit_code(&usage), 2);
}

#[test]
fn reports_are_deterministic() {
    let fig1 = fixture("fig1.json");
    let first = platoon(&["solve", "--instance", fig1.to_str().unwrap()]);
    let second = platoon(&["solve", "--instance", fig1.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
}
