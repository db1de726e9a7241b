//! End-to-end tests of the `stern` binary: exit-status contract, output
//! determinism, and scan resume through the real executable.

use std::path::Path;
use std::process::{Command, Output};

fn stern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stern"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn compute_prints_decimal() {
    let out = stern(&["compute", "11"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "5\n");

    let out = stern(&["compute", "0"]);
    assert_eq!(stdout(&out), "0\n");

    let out = stern(&["compute", "1365", "--method", "all"]);
    assert_eq!(stdout(&out), "144\n");
}

#[test]
fn usage_errors_exit_2() {
    let out = stern(&["compute", "not-a-number"]);
    assert_eq!(out.status.code(), Some(2));

    let out = stern(&["verify", "records", "--max-n", "99"]);
    assert_eq!(out.status.code(), Some(2));

    let out = stern(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));

    let out = stern(&["envelope", "-5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_passes_and_is_deterministic() {
    let a = stern(&["table"]);
    assert_eq!(a.status.code(), Some(0));
    let b = stern(&["table"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("22,5,5,181/22,181/22,true"));
}

#[test]
fn verify_domination_small() {
    let out = stern(&["verify", "domination", "--max-m", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# violations=0"));
    assert!(text.contains("5461,377,377,equal"));
}

#[test]
fn verify_gaps_always_exits_zero_with_witnesses() {
    let out = stern(&["verify", "gaps", "--from", "5", "--to", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // the ledger records non-positive gap_plus witnesses yet still passes
    assert!(text.contains("violation at 5"));
    assert!(text.contains("6,-4/165,4/33"));
}

#[test]
fn json_output_parses() {
    let out = stern(&["--format", "json", "verify", "records", "--max-n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["kind"], "records");
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn constant_honors_prec_flag() {
    let out128 = stern(&["constant"]);
    let out192 = stern(&["--prec", "192", "constant"]);
    let t128 = stdout(&out128);
    let t192 = stdout(&out192);
    assert!(t128.contains("limit_constant,0.958854190824767383209094304203"));
    // 192-bit run prints the same 30 leading digits (cap) but records prec
    assert!(t192.contains("# prec=192"));
    assert!(t192.contains("limit_constant,0.958854190824767383209094304203"));
}

#[test]
fn oeis_check_paths() {
    let out = stern(&["oeis-check"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("# mismatches=0"));

    let dir = tempfile::tempdir().unwrap();
    let tampered = dir.path().join("b.txt");
    std::fs::write(&tampered, "# comment\n10 3\n11 6\n").unwrap();
    let out = stern(&["oeis-check", "--bfile", tampered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("11,6,5"));

    let malformed = dir.path().join("bad.txt");
    std::fs::write(&malformed, "10 3\nnonsense\n").unwrap();
    let out = stern(&["oeis-check", "--bfile", malformed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_file_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gaps.csv");
    let out = stern(&[
        "--out",
        path.to_str().unwrap(),
        "gaps",
        "--from",
        "5",
        "--to",
        "60",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    // every emitted rational parses back to the exact same value
    for line in text.lines().skip_while(|l| l.starts_with('#')).skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 3);
        let gp: stern_diatomic::Rat = cells[1].parse().unwrap();
        assert_eq!(gp.to_string(), cells[1]);
    }
}

#[test]
fn scan_resume_through_binary(){
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    let out = stern(&[
        "--out",
        full.to_str().unwrap(),
        "scan",
        "--max-m",
        "3000",
        "--emit-every",
        "500",
    ]);
    assert_eq!(out.status.code(), Some(0));

    // two-stage run against the same checkpoint and output file
    let staged = dir.path().join("staged.csv");
    let ckpt = dir.path().join("scan.ckpt");
    let out = stern(&[
        "--out",
        staged.to_str().unwrap(),
        "scan",
        "--max-m",
        "1100",
        "--emit-every",
        "500",
        "--checkpoint",
        ckpt.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(ckpt.exists());
    let out = stern(&[
        "--out",
        staged.to_str().unwrap(),
        "scan",
        "--max-m",
        "3000",
        "--emit-every",
        "500",
        "--checkpoint",
        ckpt.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let full_text = std::fs::read_to_string(&full).unwrap();
    let staged_text = std::fs::read_to_string(&staged).unwrap();
    assert_eq!(full_text, staged_text);
    assert!(full_text.starts_with("m,a,ratio\n"));
    assert!(full_text.contains("# best_m=5 "));
}

#[test]
fn scan_corrupt_checkpoint_refused() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("scan.ckpt");
    std::fs::write(&ckpt, "{broken").unwrap();
    let out = stern(&[
        "scan",
        "--max-m",
        "100",
        "--checkpoint",
        ckpt.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("checkpoint"));
}

#[test]
fn scan_checkpoint_prec_mismatch_refused() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("scan.ckpt");
    let out = stern(&[
        "scan",
        "--max-m",
        "300",
        "--checkpoint",
        ckpt.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = stern(&[
        "--prec",
        "192",
        "scan",
        "--max-m",
        "600",
        "--checkpoint",
        ckpt.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("precision mismatch"));
}

#[test]
fn envelope_rational_argument() {
    let out = stern(&["envelope", "21/2"]);
    assert_eq!(out.status.code(), Some(0));
    // h(21/2) on piece 4: (21/2)/3 + 4/3 = 29/6
    assert!(stdout(&out).contains("21/2,29/6,4,5,11,1/3,4/3"));
}

#[test]
fn fetch_flag_conflicts_with_bfile() {
    let out = stern(&["oeis-check", "--fetch", "--bfile", "x.txt"]);
    assert_eq!(out.status.code(), Some(2));
}
