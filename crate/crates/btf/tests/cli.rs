//! The `btf` binary driven through its command line.

use std::path::Path;
use std::process::Command;

fn btf(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_btf")).args(args).output().unwrap();
    (out.status.success(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines().find_map(|l| l.strip_prefix(&format!("{key}: "))).unwrap_or_else(|| panic!("no {key} in {out}"))
}

#[test]
fn generate_solve_exact_certify() {
    let dir = tempfile::tempdir().unwrap();
    let (g, t) = (path(dir.path(), "g.txt"), path(dir.path(), "t.txt"));
    let (ok, _, err) = btf(&["--seed", "5", "generate", "--shape", "5", "4", "3", "--rw", "0.6", "--out", &g, "--truth", &t]);
    assert!(ok, "{err}");
    assert!(std::fs::read_to_string(&g).unwrap().starts_with("5 4 3\n"));

    for rel in ["slp", "flp", "clp"] {
        let (ok, out, err) = btf(&["solve", "--instance", &g, "--relaxation", rel, "--truth", &t]);
        assert!(ok, "{err}");
        assert_eq!(field(&out, "objective"), "0.000000000");
        assert_eq!(field(&out, "recovered"), "true");
    }
    let (ok, out, _) = btf(&["exact", "--instance", &g, "--truth", &t]);
    assert!(ok);
    assert_eq!(field(&out, "optimum"), "0");
    assert_eq!(field(&out, "optimal_tensors"), "1");
    assert_eq!(field(&out, "recovered"), "true");

    let (ok, out, _) = btf(&["certify", "--instance", &g, "--truth", &t, "--which", "slp"]);
    assert!(ok);
    assert_eq!(field(&out, "noiseless"), "true");
    let (ok, out, _) = btf(&["certify", "--instance", &g, "--truth", &t, "--which", "flp", "--format", "csv"]);
    assert!(ok);
    assert!(out.starts_with("condition,instances,holds,strict,strict_required,min_slack,violations\n"));
}

#[test]
fn solve_reports_relaxation_gap_on_noise() {
    let dir = tempfile::tempdir().unwrap();
    let (g, t) = (path(dir.path(), "g.txt"), path(dir.path(), "t.txt"));
    assert!(btf(&["--seed", "2", "generate", "--shape", "4", "4", "4", "--p", "0.45", "--out", &g, "--truth", &t]).0);
    let (_, slp, _) = btf(&["solve", "--instance", &g, "--relaxation", "slp"]);
    let (_, clp, _) = btf(&["solve", "--instance", &g, "--relaxation", "clp"]);
    let (_, exact, _) = btf(&["exact", "--instance", &g]);
    let v = |s: &str, k: &str| field(s, k).parse::<f64>().unwrap();
    assert!(v(&slp, "objective") <= v(&clp, "objective") + 1e-9);
    assert!(v(&clp, "objective") <= v(&exact, "optimum") + 1e-9);
}

#[test]
fn export_mps_and_solve_mps_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (g, a, b) = (path(dir.path(), "g.txt"), path(dir.path(), "a.mps"), path(dir.path(), "b.mps"));
    assert!(btf(&["--seed", "9", "generate", "--shape", "3", "3", "3", "--p", "0.2", "--out", &g]).0);
    assert!(btf(&["export-mps", "--instance", &g, "--relaxation", "flp", "--out", &a]).0);
    assert!(btf(&["solve", "--instance", &g, "--relaxation", "flp", "--mps", &b]).0);
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("NAME          flp\n"));
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn facets_tables_pass() {
    let (ok, out, _) = btf(&["facets", "--trials", "100"]);
    assert!(ok);
    assert_eq!(out.lines().filter(|l| l.ends_with("pass")).count(), 10);
    assert!(out.contains("polytope dimension 10"));
    let (ok, out, _) = btf(&["facets", "--shape", "2", "2", "2"]);
    assert!(ok);
    assert!(out.contains("polytope dimension 14, 8 embeddings"));
    assert_eq!(field(&out, "overall"), "pass");
}

#[test]
fn experiment_is_reproducible_and_honours_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "c.toml");
    std::fs::write(
        &cfg,
        "shape = [5, 5, 5]\nrw_grid = [0.5, 1.0]\np_grid = { start = 0.0, stop = 0.2, step = 0.1 }\ntrials = 3\n\
         relaxations = [\"slp\", \"flp\"]\nseed = 11\ncheck_unique = true\n",
    )
    .unwrap();
    let run = |threads: &str, out: &str| {
        let (ok, _, err) = btf(&["--config", &cfg, "--threads", threads, "experiment", "--no-timing", "--out", out]);
        assert!(ok, "{err}");
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("1", &path(dir.path(), "a.csv"));
    let b = run("2", &path(dir.path(), "b.csv"));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 2 * 3 * 2);
    assert!(a.lines().nth(1).unwrap().starts_with("0.5,0.512,0,slp,3,3,1,,"));

    let svg = path(dir.path(), "svg");
    let rec = path(dir.path(), "r.csv");
    let (ok, _, _) = btf(&[
        "--config", &cfg, "--seed", "12", "experiment", "--trials", "1", "--relaxations", "slp", "--records", &rec,
        "--svg-dir", &svg, "--overlay", "--out", &path(dir.path(), "c.csv"),
    ]);
    assert!(ok);
    assert_eq!(std::fs::read_to_string(&rec).unwrap().lines().count(), 1 + 6);
    assert!(Path::new(&svg).join("slp.svg").exists());
    assert!(!Path::new(&svg).join("flp.svg").exists());
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.txt");
    std::fs::write(&g, "2 2 2\n1 0 1\n").unwrap();
    let (ok, _, err) = btf(&["solve", "--instance", &g, "--relaxation", "slp"]);
    assert!(!ok);
    assert!(err.contains("expected 8 entries"), "{err}");
    let (ok, _, _) = btf(&["generate", "--rw", "0"]);
    assert!(!ok);
}
