use std::path::Path;
use std::process::{Command, Output};

use polarsolve::emit::Table;
use polarsolve::manifest::verify_artifacts;
use polarsolve_core::single_elite::solve_infinite;
use polarsolve_core::{CostSpec, Grid, ModelParams, Side};
use serde_json::Value;

fn polarsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarsolve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(sub: &str, out: &Path, overrides: &[&str]) -> Output {
    let mut args = vec![sub, "--out", out.to_str().unwrap()];
    for o in overrides {
        args.extend(["--override", o]);
    }
    polarsolve(&args)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn out_of_range_beta_exits_two_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "k = 10\nbeta = 1.2\n").unwrap();
    let o = polarsolve(&["solve-single", "--config", cfg.to_str().unwrap(), "--out", "unused"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("`beta`") && msg.contains("line 2"), "{msg}");
}

#[test]
fn unknown_field_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve-mpe", dir.path(), &["gamma=2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gamma"));
}

#[test]
fn three_point_tables_and_median_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve-single", dir.path(), &["grid_n=3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("value.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    let t = Table::read(&dir.path().join("value.csv")).unwrap();
    assert_eq!(t.header, ["p", "v_s0", "v_s1"]);
    let mid = &t.rows[1];
    assert_eq!(mid[0], 0.5);
    // value iteration stops at 1e-10, within 1e-9 of the fixed point
    assert!((mid[1] - 10.0).abs() < 1e-8 && (mid[2] - 10.0).abs() < 1e-8);
    let p = Table::read(&dir.path().join("policy.csv")).unwrap();
    assert_eq!(p.header, ["p", "sigma_s0", "sigma_s1"]);
}

#[test]
fn free_moves_give_the_alternating_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve-mpe", dir.path(), &["k=0", "grid_n=101"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = Table::read(&dir.path().join("value.csv")).unwrap();
    assert_eq!(t.header, ["p", "vA_s0", "vA_s1", "uA", "vB_s0", "vB_s1", "uB"]);
    let (v, u) = (1.0 / (1.0 - 0.81), 0.9 / (1.0 - 0.81));
    for row in &t.rows {
        for (x, want) in row[1..].iter().zip([v, v, u, v, v, u]) {
            assert!((x - want).abs() <= 1e-8, "{row:?}");
        }
    }
    let p = Table::read(&dir.path().join("policy.csv")).unwrap();
    assert_eq!(p.header, ["p", "sigmaA_s0", "sigmaA_s1", "sigmaB_s0", "sigmaB_s1"]);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run("solve-single2p", out, &["grid_n=201", "profile_p0=0.35"]);
        assert_eq!(o.status.code(), Some(0));
    }
    for file in ["policy.csv", "value.csv", "period2_policy.csv", "period2_value.csv", "candidates.json", "profile.csv"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    let strip = |dir: &Path| {
        let mut m = manifest(dir);
        m["diagnostics"].as_object_mut().unwrap().remove("wall_time_s");
        m
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(verify_artifacts(&a, &manifest(&a)), Ok(()));
}

#[test]
fn emitted_tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve-single", dir.path(), &["grid_n=101", "pi=0.7", "k=0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let grid = Grid::new(101).unwrap();
    let params = ModelParams::new(0.7, 0.9, 1.0).unwrap();
    let cost = CostSpec::quadratic(0.5, 1.0).unwrap();
    let sol = solve_infinite(&params, &cost, &grid, 1e-10, 10_000).unwrap();
    let values = Table::read(&dir.path().join("value.csv")).unwrap();
    let policy = Table::read(&dir.path().join("policy.csv")).unwrap();
    for (i, (v, p)) in values.rows.iter().zip(&policy.rows).enumerate() {
        assert!((v[0] - grid.point(i)).abs() <= 1e-12);
        for s in Side::BOTH {
            assert!((v[1 + s.index()] - sol.values.get(s, i)).abs() <= 1e-12);
            assert!((p[1 + s.index()] - sol.policy.share(s, i)).abs() <= 1e-12);
        }
    }
}

#[test]
fn exhausted_iterations_exit_three_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve-single", dir.path(), &["grid_n=51", "max_iter=5"]);
    assert_eq!(o.status.code(), Some(3));
    let m = manifest(dir.path());
    assert_eq!(m["diagnostics"]["converged"], Value::Bool(false));
    assert_eq!(m["exit_code"], 3);
    assert!(dir.path().join("policy.csv").exists());
}

#[test]
fn sweep_writes_index_and_shrinks_intervention() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        "sweep",
        dir.path(),
        &["sweep_target=solve-single", "sweep.k=[0.5, 10, 200]", "grid_n=201"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let index = std::fs::read_to_string(dir.path().join("index.csv")).unwrap();
    assert_eq!(index.lines().next(), Some("run,dir,k,converged,exit_code"));
    assert_eq!(index.lines().count(), 4);
    let moved = |run: &str, col: usize| {
        let t = Table::read(&dir.path().join(run).join("policy.csv")).unwrap();
        t.rows.iter().filter(|r| r[col] != r[0]).count()
    };
    for col in [1, 2] {
        let counts: Vec<usize> = ["run_000", "run_001", "run_002"].iter().map(|r| moved(r, col)).collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
    }
}

#[test]
fn sweep_over_cap_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        "sweep",
        dir.path(),
        &["sweep_target=solve-single", "sweep.k=[1, 2, 3]", "sweep_cap=2"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sweep_cap"));
}

#[test]
fn custom_cost_table_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<String> = (0..2001).map(|i| format!("{}", 10.0 * (i as f64 / 2000.0).powi(2))).collect();
    std::fs::write(dir.path().join("cost.txt"), values.join("\n")).unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "cost = \"custom\"\ncost_table = \"cost.txt\"\ngrid_n = 101\nprofile_p0 = 0.35\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = polarsolve(&[
        "solve-stackelberg",
        "--config",
        dir.path().join("run.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let policy = Table::read(&out.join("policy.csv")).unwrap();
    assert_eq!(policy.rows.len(), 101);
    let profile = Table::read(&out.join("profile.csv")).unwrap();
    assert_eq!(profile.header, ["p1", "benefit_s0", "benefit_s1", "cost"]);
}

#[test]
fn oracle_check_passes_on_a_small_scan() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("oracle-check", dir.path(), &["scan_n=11", "oracle_n=1001"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = Table::read(&dir.path().join("oracle_check.csv")).unwrap();
    assert_eq!(t.rows.len(), 22);
}
