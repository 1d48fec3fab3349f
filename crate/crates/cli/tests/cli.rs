use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_hessian-bellman");

fn disc(h: f64, g: &str, k: f64) -> String {
    format!("[problem]\ndomain = disc\nd = 2\nm = 2\nh = {h}\ng = {g}\nK = {k}\n\n[net]\nframes = 8\nprofiles = 8\nseed = 1\n")
}

fn run(dir: &Path, command: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join(format!("{command}.conf"));
    fs::write(&path, config).unwrap();
    Command::new(BIN).arg(command).arg("--config").arg(&path).args(extra).output().unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    let line = text.lines().find(|l| l.starts_with(&prefix)).unwrap_or_else(|| panic!("no `{key}` in\n{text}"));
    line[prefix.len()..].trim().parse().unwrap()
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_matches_golden_file() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), "solve", &disc(0.03125, "constant 1", 1.0), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got = rows(&tmp.path().join("out/u.csv"));
    let want = rows(&fixture("disc_constant_exact.csv"));
    assert_eq!(got.len(), want.len());
    for (a, b) in got.iter().zip(&want) {
        assert_eq!(a[..2], b[..2]);
        assert!((a[2] - b[2]).abs() <= 2e-2, "{a:?} vs {b:?}");
    }
    let report = fs::read_to_string(tmp.path().join("out/report.txt")).unwrap();
    for section in ["[run]", "[problem]", "[net]", "[solver]", "[assumption]", "[monitors]"] {
        assert!(report.contains(section), "{section}");
    }
    assert_eq!(value(&report, "admissible_fraction"), 1.0);
    assert!(value(&report, "final_residual") <= 1e-8);
}

#[test]
fn missing_field_is_reported() {
    let tmp = TempDir::new().unwrap();
    let config = disc(0.0625, "constant 1", 1.0).replace("m = 2\n", "");
    let o = run(tmp.path(), "solve", &config, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("[failure]"), "{err}");
    assert!(err.contains("kind = config"));
    assert!(err.contains("field = problem.m"));
    assert!(!tmp.path().join("out/u.csv").exists());
}

#[test]
fn unreadable_config_and_bad_values() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(BIN).args(["solve", "--config"]).arg(tmp.path().join("nope.conf")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind = io"));
    let o = run(tmp.path(), "solve", &disc(0.0625, "constant 1", 1.0).replace("domain = disc", "domain = torus"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field = problem.domain"));
    let o = run(tmp.path(), "solve", &disc(0.0625, "constant 1", 1.0).replace("m = 2", "m = 3"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind = config"), "{}", stderr(&o));
}

#[test]
fn props_pass_with_seed_one() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), "props", "[props]\ncases = 1000\npairs = 10000\n", &["--seed", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(tmp.path().join("out/props.txt")).unwrap();
    assert!(table.lines().count() > 20);
    assert!(!table.contains("FAIL"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("properties passed"));
}

#[test]
fn audit_round_trip() {
    let tmp = TempDir::new().unwrap();
    let config = disc(0.0625, "constant 1", 1.0);
    assert!(run(tmp.path(), "solve", &config, &[]).status.success());
    let audit = format!("{config}\n[audit]\ninput = out/u.csv\n[output]\ndir = audited\n");
    let o = run(tmp.path(), "audit", &audit, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = fs::read_to_string(tmp.path().join("out/report.txt")).unwrap();
    let audited = fs::read_to_string(tmp.path().join("audited/audit.txt")).unwrap();
    let a = value(&report, "admissibility_margin");
    let b = value(&audited, "worst_margin");
    assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    assert_eq!(value(&audited, "fraction"), 1.0);
}

#[test]
fn audit_rejects_mismatched_grid() {
    let tmp = TempDir::new().unwrap();
    assert!(run(tmp.path(), "solve", &disc(0.125, "constant 1", 1.0), &[]).status.success());
    let audit = format!("{}\n[audit]\ninput = out/u.csv\n", disc(0.0625, "constant 1", 1.0));
    let o = run(tmp.path(), "audit", &audit, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field = audit.input"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let config = disc(0.0625, "radial-square", 4.0);
    for out in ["a", "b"] {
        let dir = tmp.path().join(out);
        assert!(run(tmp.path(), "solve", &config, &["--out", dir.to_str().unwrap()]).status.success());
    }
    let a = fs::read(tmp.path().join("a/u.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/u.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), "solve", &disc(0.125, "radial-square", 4.0), &["--seed", "5"]);
    assert!(o.status.success());
    let report = fs::read_to_string(tmp.path().join("out/report.txt")).unwrap();
    assert!(report.contains("seed = 5\n"));
}

#[test]
fn ladder_writes_rungs_and_failures() {
    let tmp = TempDir::new().unwrap();
    let config = format!("{}\n[ladder]\nn = 2, 4\n", disc(0.125, "radial-square", 4.0));
    let o = run(tmp.path(), "ladder", &config, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["u_n2.csv", "u_n4.csv", "ladder_report.txt"] {
        assert!(tmp.path().join("out").join(name).exists(), "{name}");
    }
    let report = fs::read_to_string(tmp.path().join("out/ladder_report.txt")).unwrap();
    assert!(report.contains("[rung.4]") && report.contains("c11_surrogate = true"));

    let failing = format!("{config}\n[solver]\nmax_iters = 1\n[output]\ndir = failed\n");
    let o = run(tmp.path(), "ladder", &failing, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("kind = non-convergence"));
    let partial = fs::read_to_string(tmp.path().join("failed/ladder_report.txt")).unwrap();
    assert!(partial.contains("status = fail"));
}
