use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_squarepack"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn pack(args: &[&str], input: &Path) -> Output {
    bin().arg("pack").arg(input).args(args).output().unwrap()
}

fn lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn three_trivial_placements() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "seq.txt", "0.6\n0.3\n0.2\n");
    let out = pack(&["--verify"], &input);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = lines(&out);
    assert_eq!(recs.len(), 3);
    assert_eq!((recs[0]["x"].as_f64(), recs[0]["y"].as_f64()), (Some(0.4), Some(0.4)));
    assert_eq!((recs[1]["x"].as_f64(), recs[1]["y"].as_f64()), (Some(0.7), Some(0.0)));
    assert_eq!(recs[2]["class"], "c0");
    assert_eq!(recs[2]["y"].as_f64(), Some(0.5));
    for r in &recs {
        let keys: Vec<_> = r.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 6, "{r}");
    }
}

#[test]
fn two_larges_exit_one_with_rejection_record() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "seq.json", "[0.51, 0.51]");
    let out = pack(&[], &input);
    assert_eq!(out.status.code(), Some(1));
    let recs = lines(&out);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[1]["status"], "rejected");
    assert_eq!(recs[1]["reason"], "no_fit");
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "0.2\n2.5e-1\n");
    assert_eq!(pack(&[], &bad).status.code(), Some(2));
    let missing = dir.path().join("missing.txt");
    assert_eq!(pack(&[], &missing).status.code(), Some(2));
    let digits = write(&dir, "digits.txt", "0.1234567890123\n");
    assert_eq!(pack(&[], &digits).status.code(), Some(2));
    let out_of_range = write(&dir, "range.txt", "0.2\n1.5\n");
    assert_eq!(pack(&[], &out_of_range).status.code(), Some(2));
}

#[test]
fn budget_enforcement_rejects_overflow() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "seq.txt", "0.5\n0.4\n");
    let out = pack(&["--enforce-budget"], &input);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(lines(&out)[1]["reason"], "budget_exceeded");
    let out = pack(&["--enforce-budget", "--budget", "0.5"], &input);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn svg_and_log_files() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "seq.txt", "0.3\n0.2\n0.1\n0.05\n");
    let svg = dir.path().join("out.svg");
    let log = dir.path().join("out.jsonl");
    let out = pack(
        &["--svg", svg.to_str().unwrap(), "--log", log.to_str().unwrap()],
        &input,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(&log).unwrap().lines().count(), 4);
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains("p1") && text.contains("b0"));
}

#[test]
fn pack_logs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let gen = bin()
        .args(["gen", "--seed", "11", "--dist", "very_small_heavy"])
        .output()
        .unwrap();
    assert!(gen.status.success());
    let input = dir.path().join("seq.txt");
    fs::write(&input, &gen.stdout).unwrap();
    let a = pack(&["--verify"], &input);
    let b = pack(&["--verify"], &input);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gen_matches_library() {
    let out = bin()
        .args(["gen", "--seed", "3", "--dist", "class_boundary"])
        .output()
        .unwrap();
    let parsed = squarepack_cli::input::parse_sequence(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let spec = squarepack::SequenceSpec::new(3, squarepack::Distribution::ClassBoundary);
    assert_eq!(parsed, squarepack::generate(&spec));
}

#[test]
fn fuzz_reports_and_exits() {
    let ok = bin()
        .args(["fuzz", "--runs", "100", "--dist", "uniform", "--audit-all"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("100/100 packed"));

    let over = ["fuzz", "--runs", "100", "--budget", "0.5", "--dist", "medium_heavy"];
    let strict = bin().args(over).output().unwrap();
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("first failing seed"));
    let lenient = bin().args(over).arg("--allow-failures").output().unwrap();
    assert_eq!(lenient.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&lenient.stdout).contains("FAIL seed"));

    let bad = bin().args(["fuzz", "--dist", "gaussian"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn adversaries_hold() {
    let out = bin().arg("adversary").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).matches("held").count(), 4);
}
