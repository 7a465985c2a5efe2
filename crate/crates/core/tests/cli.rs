//! Command-line behaviour: exit codes, output files, resume.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_endpoint-select");
const HEADER: &str = "scenario_id,p1_0,p2_0,or1,or2,rho,omega,design,reassess,sizing_basis,planned_n,\
rejection_rate,mc_se,mean_n,sd_n,prop_composite_selected";

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL_GRID: &str = "seed = 3\nreplications = 400\n[design]\nalpha = 0.05\npower = 0.8\n\
[grid]\np1_0 = [0.2]\np2_0 = [0.1, 0.25]\nor1 = [0.6]\nor2 = [0.8]\nrho = [0.0, 0.3]\n\
hypotheses = [\"alternative\", \"null\"]\n\
[[grid.rows]]\nsizing = \"composite_rho0\"\nomega = 0.5\nreassess = true\n";

#[test]
fn design_calc_reports_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let cfg = configs().join("peritoneal_design.toml");
    let o = run(&["design-calc", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("rho,n_relevant,n_composite,d,selected"));
    assert_eq!(lines.next(), Some("0,240,232,1.038123,composite"));
    assert!(csv.contains("0.5,240,,,invalid"));
    let summary = String::from_utf8(o.stdout).unwrap();
    assert!(summary.contains("interim_size = 232"), "{summary}");
    assert!(summary.contains("crossing_rho = 0.10"), "{summary}");
}

#[test]
fn design_calc_without_effect_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("peritoneal_design.toml"))
        .unwrap()
        .replace("odds_ratio = 0.52", "odds_ratio = 1.0")
        .replace("odds_ratio = 0.66", "odds_ratio = 1.0");
    let cfg = write(dir.path(), "null.toml", &text);
    let o = run(&["design-calc", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("no treatment effect"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_a_config_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("peritoneal_design.toml"))
        .unwrap()
        .replace("power = 0.8", "power = 0.8\npowr = 0.9");
    let cfg = write(dir.path(), "typo.toml", &text);
    let o = run(&["design-calc", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line ") && err.contains("powr"), "{err}");
}

#[test]
fn select_reports_json_and_rejects_bad_counts() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s.json");
    let cfg = configs().join("peritoneal_select.toml");
    let o = run(&["select", "--config", cfg.to_str().unwrap(), "--out", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["selected"], "relevant");
    assert_eq!(v["n_a"], 240);
    assert!(String::from_utf8(o.stdout).unwrap().contains("decision ratio d"));

    let text = std::fs::read_to_string(&cfg).unwrap().replace("events_composite = 126", "events_composite = 100");
    let bad = write(dir.path(), "bad.toml", &text);
    let o = run(&["select", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("c_star >= max(c1, c2)"), "{}", stderr(&o));
}

#[test]
fn empty_grid_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_GRID.replace("rho = [0.0, 0.3]", "rho = []");
    let cfg = write(dir.path(), "empty.toml", &text);
    let out = dir.path().join("r.csv");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), format!("{HEADER}\n"));
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", SMALL_GRID);
    let out = dir.path().join("missing").join("r.csv");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn simulate_is_deterministic_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", SMALL_GRID);
    let cfg = cfg.to_str().unwrap();
    let full = dir.path().join("full.csv");
    let plots = dir.path().join("plots");
    let o = run(&[
        "simulate",
        "--config",
        cfg,
        "--out",
        full.to_str().unwrap(),
        "--threads",
        "1",
        "--plots",
        plots.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let reference = std::fs::read_to_string(&full).unwrap();
    assert_eq!(reference.lines().count(), 1 + 2 * 2 * 2 * 3);
    assert!(reference.starts_with(HEADER));
    assert!(plots.join("power_vs_rho.csv").exists());
    assert!(plots.join("power_fig_0000.svg").exists());

    let parallel = dir.path().join("par.csv");
    let o = run(&["simulate", "--config", cfg, "--out", parallel.to_str().unwrap(), "--threads", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&parallel).unwrap(), reference);

    // Interrupt after five rows with a half-written sixth, then resume.
    let manifest_path = PathBuf::from(format!("{}.manifest.json", parallel.display()));
    let mut m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(m["completed"].as_array().unwrap().len(), 24);
    m["completed"] = serde_json::json!([0, 1, 2, 3, 4]);
    std::fs::write(&manifest_path, m.to_string()).unwrap();
    let partial: String = reference.lines().take(6).map(|l| format!("{l}\n")).collect::<String>() + "5,0.2,0.1";
    std::fs::write(&parallel, partial).unwrap();
    let o = run(&["simulate", "--config", cfg, "--out", parallel.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("(5 resumed)"), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&parallel).unwrap(), reference);

    // A different seed against the same manifest is configuration drift.
    let o = run(&["simulate", "--config", cfg, "--out", parallel.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("different grid"), "{}", stderr(&o));
}

#[test]
fn paper_grid_expands_the_reference_study() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reference_grid.csv");
    let o = run(&["simulate", "--paper-grid", "--reps", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = std::fs::read_to_string(&out).unwrap().lines().count() - 1;
    assert_eq!(rows, 2889);
}

#[test]
fn missing_config_and_bad_flags_are_config_errors() {
    assert_eq!(run(&["simulate", "--out", "x.csv"]).status.code(), Some(2));
    assert_eq!(run(&["design-calc", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
