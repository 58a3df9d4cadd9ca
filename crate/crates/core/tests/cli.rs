use std::process::{Command, Output};

fn iterseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iterseq"))
        .args(args)
        .env_remove("ITERSEQ_WORKERS")
        .output()
        .expect("spawn iterseq")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn verify_reports_do_not_depend_on_worker_count() {
    for kind in ["dfp", "dpp"] {
        let one = iterseq(&["verify", kind, "--workers", "1", "--no-timing"]);
        let three = iterseq(&["verify", kind, "--workers", "3", "--no-timing"]);
        let no_memo = iterseq(&["verify", kind, "--workers", "2", "--no-timing", "--no-memo"]);
        assert_eq!(one.status.code(), Some(0));
        assert_eq!(one.stdout, three.stdout, "{kind}");
        assert_eq!(one.stdout, no_memo.stdout, "{kind}");
    }
}

#[test]
fn workers_default_from_environment() {
    let explicit = iterseq(&["collatz", "verify", "--upto", "20000", "--workers", "4"]);
    let from_env = Command::new(env!("CARGO_BIN_EXE_iterseq"))
        .args(["collatz", "verify", "--upto", "20000"])
        .env("ITERSEQ_WORKERS", "4")
        .output()
        .unwrap();
    let single = iterseq(&["collatz", "verify", "--upto", "20000", "--workers", "1"]);
    assert_eq!(explicit.status.code(), Some(0));
    assert_eq!(explicit.stdout, from_env.stdout);
    assert_eq!(explicit.stdout, single.stdout);
}

#[test]
fn collatz_csv_golden() {
    let out = iterseq(&["collatz", "--start", "36", "--csv"]);
    let want = "step,value\n0,36\n1,18\n2,9\n3,28\n4,14\n5,7\n6,22\n7,11\n8,34\n9,17\n10,52\n\
                11,26\n12,13\n13,40\n14,20\n15,10\n16,5\n17,16\n18,8\n19,4\n20,2\n21,1\n";
    assert_eq!(stdout(&out), want);
}

#[test]
fn table1_golden() {
    let out = iterseq(&["kaprekar", "table1"]);
    assert_eq!(out.status.code(), Some(0));
    let want = "\
Base  Digit length  fixed points  loops
2     4             10, 101       none
2     5             none          {110, 1111}
2     6             101001        none
2     7             none          {1001011, 1011101}
2     8             11010001      none
2     9             none          {110010101, 110111001}
";
    assert_eq!(stdout(&out), want);
}

#[test]
fn kaprekar_step_and_degenerate() {
    let out = iterseq(&["kaprekar", "step", "--base", "10", "--length", "4", "-u", "1", "-v", "1", "--value", "1234"]);
    assert_eq!((out.status.code(), stdout(&out)), (Some(0), "3087\n".to_string()));
    let out = iterseq(&["kaprekar", "step", "--base", "10", "--length", "3", "-u", "2", "-v", "2", "--value", "0"]);
    assert_eq!((out.status.code(), stdout(&out)), (Some(0), "degenerate\n".to_string()));
}

#[test]
fn classification_is_reproducible_json() {
    let args = ["kaprekar", "classify", "--base", "10", "--length", "3", "-u", "2", "-v", "2"];
    let a = iterseq(&args);
    let b = iterseq(&args);
    assert_eq!(a.stdout, b.stdout);
    let j: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(j["fixed_points"], serde_json::json!([450]));
}

#[test]
fn exit_codes() {
    assert_eq!(iterseq(&["collatz", "--start", "abc"]).status.code(), Some(2));
    assert_eq!(iterseq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(iterseq(&["kaprekar", "step", "--base", "1", "--length", "4", "--value", "0"]).status.code(), Some(2));

    let capped = iterseq(&["kaprekar", "classify", "--base", "10", "--length", "8"]);
    assert_eq!(capped.status.code(), Some(3));
    assert_eq!(iterseq(&["collatz", "--start", "27", "--max-steps", "10"]).status.code(), Some(3));

    let mismatch = iterseq(&["kaprekar", "classify", "--base", "10", "--length", "3", "-u", "2", "-v", "2", "--expect", "451"]);
    assert_eq!(mismatch.status.code(), Some(1));
    assert!(!mismatch.stdout.is_empty());
}

#[test]
fn trajectory_trace_and_catalog_entry() {
    let out = iterseq(&["dfp", "--start", "145"]);
    let j: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(j["catalog_entry"], "fixC");
    assert_eq!(j["transient_length"], 0);

    let trace = iterseq(&["dpp", "--start", "3435", "--trace"]);
    assert_eq!(stdout(&trace), "step,value\n0,3435\n");
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = iterseq(&["verify", "dfp", "--no-timing", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let direct = iterseq(&["verify", "dfp", "--no-timing"]);
    assert_eq!(written.as_bytes(), direct.stdout.as_slice());
    assert!(String::from_utf8_lossy(&out.stderr).contains("11439 cases"));
}
