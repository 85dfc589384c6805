//! End-to-end tests of the spanbound binary: exit codes, stdout shape,
//! JSONL logs, and determinism across thread counts. Every test writes its
//! instance files to a private scratch directory and invokes the compiled
//! binary directly.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spanbound_cli::runner::{RunRecord, EXIT_BUDGET, EXIT_OK, EXIT_USAGE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spanbound"))
}

/// A scratch directory private to one test, wiped on entry.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spanbound-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const KNESER_PAIR: &str = r#"{
  "backend": {"kind": "FF", "p": 2, "modulus": [1, 1, 0, 0, 1]},
  "sets": {"A": ["1", "x"], "B": ["1", "x"]},
  "query": {"checker": "kneser", "sets": ["A", "B"]}
}"#;

const FF256: &str = r#"{"kind": "FF", "p": 2, "modulus": [1, 1, 0, 1, 1, 0, 0, 0, 1]}"#;

const INSEPARABLE: &str = r#"{"kind": "EXT", "coeff": {"name": "GFS", "p": 2}, "g": ["-s", "0", "1"]}"#;

#[test]
fn check_reports_a_tight_kneser_pair() {
    let dir = scratch("check-kneser");
    let file = write(&dir, "kneser.json", KNESER_PAIR);
    let log = dir.join("log.jsonl");
    let out = bin()
        .arg("check")
        .arg(&file)
        .arg("--out")
        .arg(&log)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("[kneser] backend=GF(2^4)"), "{text}");
    assert!(text.contains("product_dim=3"), "{text}");
    assert!(text.contains("stabilizer_dim=1"), "{text}");
    assert!(text.contains("slack=0"), "{text}");
    assert!(text.contains("check: 1 records, 0 failures, 0 findings"), "{text}");
    // Timing stays on stderr so stdout is reproducible.
    assert!(!text.contains("elapsed"), "{text}");
    assert!(stderr_of(&out).contains("elapsed"), "{}", stderr_of(&out));
    let record: RunRecord = serde_json::from_str(fs::read_to_string(&log).unwrap().trim()).unwrap();
    assert_eq!(record.checker, "kneser");
    assert!(record.proven && record.holds);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn malformed_elements_exit_with_usage() {
    let dir = scratch("check-bad");
    let file = write(
        &dir,
        "bad.json",
        r#"{
  "backend": {"kind": "FF", "p": 2, "modulus": [1, 1, 0, 0, 1]},
  "sets": {"A": ["1", "x + (x^2"]},
  "query": {"checker": "cube", "a": "A"}
}"#,
    );
    let out = bin().arg("check").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let err = stderr_of(&out);
    assert!(err.contains("syntax error at byte"), "{err}");
    assert!(err.contains("\"A\""), "the offending set is named: {err}");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn budget_overruns_exit_three_and_overrides_lift_them() {
    let dir = scratch("check-budget");
    let file = write(
        &dir,
        "rho.json",
        r#"{
  "backend": {"kind": "FF", "p": 2, "modulus": [1, 1, 0, 0, 0, 0, 1]},
  "sets": {"A": ["1", "x", "x^2", "x^3"], "B": ["1", "x"]},
  "query": {"checker": "rho", "a": "A", "b": "B", "mode": "exhaustive"},
  "budget": 10
}"#,
    );
    let out = bin().arg("check").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_BUDGET));
    assert!(stderr_of(&out).contains("budget exceeded"), "{}", stderr_of(&out));
    // The dim-4 span has 66 nonzero subspaces; a budget of 100 covers them.
    let out = bin()
        .arg("check")
        .arg(&file)
        .arg("--budget")
        .arg("100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("search_mode=exhaustive"), "{text}");
    assert!(text.contains("subspaces_examined=66"), "{text}");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn fuzz_campaigns_are_byte_identical_across_thread_counts() {
    let dir = scratch("fuzz-determinism");
    let mut runs = Vec::new();
    for (tag, threads) in [("a", "1"), ("b", "5")] {
        let log = dir.join(format!("log-{tag}.jsonl"));
        let out = bin()
            .arg("fuzz")
            .arg("--backend")
            .arg(FF256)
            .arg("--checker")
            .arg("kneser")
            .arg("--count")
            .arg("40")
            .arg("--seed")
            .arg("7")
            .arg("--threads")
            .arg(threads)
            .arg("--out")
            .arg(&log)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(EXIT_OK), "{}", stderr_of(&out));
        runs.push((out.stdout, fs::read(&log).unwrap()));
    }
    assert_eq!(runs[0].0, runs[1].0, "stdout must not depend on thread count");
    assert_eq!(runs[0].1, runs[1].1, "logs must not depend on thread count");
    let text = String::from_utf8(runs[0].0.clone()).unwrap();
    assert!(text.contains("fuzz: 40 records, 0 failures, 0 findings"), "{text}");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn incompatible_fuzz_targets_exit_with_usage() {
    let out = bin()
        .arg("fuzz")
        .arg("--backend")
        .arg(r#"{"kind": "QUAT"}"#)
        .arg("--checker")
        .arg("plunnecke")
        .arg("--count")
        .arg("5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let err = stderr_of(&out);
    assert!(err.contains("commutative division"), "{err}");
}

#[test]
fn inseparable_fuzzing_reports_findings_without_failing() {
    let dir = scratch("fuzz-inseparable");
    let log = dir.join("findings.jsonl");
    let out = bin()
        .arg("fuzz")
        .arg("--backend")
        .arg(INSEPARABLE)
        .arg("--checker")
        .arg("kneser")
        .arg("--count")
        .arg("60")
        .arg("--seed")
        .arg("3")
        .arg("--mode")
        .arg("report")
        .arg("--out")
        .arg(&log)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("fuzz: 60 records, 0 failures,"));
    // Every logged record is well formed and truthful about provenness.
    let body = fs::read_to_string(&log).unwrap();
    let mut seen = 0;
    for line in body.lines().filter(|l| !l.trim().is_empty()) {
        let record: RunRecord = serde_json::from_str(line).unwrap();
        assert_eq!(record.checker, "kneser");
        assert!(!record.proven, "pair Kneser is unproven on an inseparable extension");
        seen += 1;
    }
    assert_eq!(seen, 60);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn report_renders_markdown_and_csv_from_logs() {
    let dir = scratch("report");
    let log = dir.join("log.jsonl");
    let seeded = bin()
        .arg("fuzz")
        .arg("--backend")
        .arg(FF256)
        .arg("--checker")
        .arg("kneser")
        .arg("--count")
        .arg("12")
        .arg("--seed")
        .arg("42")
        .arg("--out")
        .arg(&log)
        .output()
        .unwrap();
    assert_eq!(seeded.status.code(), Some(EXIT_OK));
    let md = dir.join("summary.md");
    let csv = dir.join("table.csv");
    let out = bin()
        .arg("report")
        .arg(&log)
        .arg("--out")
        .arg(&md)
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", stderr_of(&out));
    let summary = fs::read_to_string(&md).unwrap();
    assert!(summary.contains("# Run summary"), "{summary}");
    assert!(summary.contains("| kneser | GF(2^8) | 12 |"), "{summary}");
    assert!(summary.contains("## Extremal instances"), "{summary}");
    let table = fs::read_to_string(&csv).unwrap();
    assert!(
        table.starts_with("checker,backend,instance,seed,proven,holds"),
        "{table}"
    );
    assert_eq!(table.lines().count(), 13, "header plus one row per record");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn report_of_no_logs_is_empty_but_clean() {
    let out = bin().arg("report").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(stdout_of(&out).contains("# Run summary"));
}

#[test]
fn embed_group_matches_hand_counts_on_s3() {
    let dir = scratch("embed-group");
    let file = write(
        &dir,
        "s3.json",
        r#"{
  "group": {"kind": "named", "name": "s3"},
  "sets": {"X": [0, 2], "Y": [0, 5], "Z": [0, 3]},
  "query": {"checker": "ruzsa", "x": "X", "y": "Y", "z": "Z"}
}"#,
    );
    let out = bin().arg("embed-group").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("xy_card=4"), "{text}");
    assert!(text.contains("yz_card=4"), "{text}");
    assert!(text.contains("xyz_card=6"), "{text}");
    assert!(text.contains("max_middle_card=4"), "{text}");
    assert!(text.contains("embed-group: 1 records, 0 failures, 0 findings"), "{text}");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn atoms_command_rejects_other_queries() {
    let dir = scratch("atoms-reject");
    let file = write(&dir, "kneser.json", KNESER_PAIR);
    let out = bin().arg("atoms").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(stderr_of(&out).contains("atoms query"), "{}", stderr_of(&out));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn atoms_command_reports_kappa_and_the_atom() {
    let dir = scratch("atoms-run");
    let file = write(
        &dir,
        "atoms.json",
        r#"{
  "backend": {"kind": "FF", "p": 2, "modulus": [1, 1, 0, 0, 0, 0, 1]},
  "sets": {"V": ["1", "x^21"]},
  "query": {"checker": "atoms", "v": "V", "lambda": "1/2"},
  "budget": 5000
}"#,
    );
    let out = bin().arg("atoms").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    // x^21 generates GF(4) inside GF(64); V = GF(4) is its own atom and
    // a division ring, with kappa = 2 - (1/2)*2 = 1.
    assert!(text.contains("kappa=1"), "{text}");
    assert!(text.contains("atom_dim=2"), "{text}");
    assert!(text.contains("atom_is_division_ring=true"), "{text}");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn environment_variable_caps_workers_without_changing_output() {
    let dir = scratch("env-threads");
    let log_env = dir.join("log-env.jsonl");
    let out_env = bin()
        .arg("fuzz")
        .arg("--backend")
        .arg(FF256)
        .arg("--checker")
        .arg("ruzsa-triple")
        .arg("--count")
        .arg("15")
        .arg("--seed")
        .arg("11")
        .arg("--out")
        .arg(&log_env)
        .env("SPANBOUND_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out_env.status.code(), Some(EXIT_OK), "{}", stderr_of(&out_env));
    let log_flag = dir.join("log-flag.jsonl");
    let out_flag = bin()
        .arg("fuzz")
        .arg("--backend")
        .arg(FF256)
        .arg("--checker")
        .arg("ruzsa-triple")
        .arg("--count")
        .arg("15")
        .arg("--seed")
        .arg("11")
        .arg("--threads")
        .arg("1")
        .arg("--out")
        .arg(&log_flag)
        .output()
        .unwrap();
    assert_eq!(out_flag.status.code(), Some(EXIT_OK), "{}", stderr_of(&out_flag));
    assert_eq!(out_env.stdout, out_flag.stdout);
    assert_eq!(fs::read(&log_env).unwrap(), fs::read(&log_flag).unwrap());
    fs::remove_dir_all(&dir).unwrap();
}
