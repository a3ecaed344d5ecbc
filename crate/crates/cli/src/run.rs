//! Experiment execution: solve, write artifacts, write the manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use polarsolve_core::oracle::{brute_force_one_step, StackelbergOracle, TwoPeriodOracle};
use polarsolve_core::single_elite::{
    period1_objective, period1_solve, period2_solve, solve_infinite, verify_polarization_pull, Provenance,
};
use polarsolve_core::two_elite::{
    check_no_deviation, mpe_solve, stackelberg_objective, stackelberg_solve, StackelbergMove,
};
use polarsolve_core::{stage_payoff, CostSpec, Grid, ModelParams, Side};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::emit::{self, Table};
use crate::manifest::{write_artifact, Artifact, RunManifest, FORMAT_VERSION};
use crate::RunError;

/// Exit code for a run whose solver did not converge or whose oracle check
/// failed.
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub converged: bool,
    pub exit_code: i32,
}

/// What one experiment produced before the manifest is assembled.
struct Output {
    artifacts: Vec<Artifact>,
    diagnostics: Map<String, Value>,
    converged: bool,
}

fn side_label(s: Side) -> u8 {
    s.index() as u8
}

/// Runs `config` and writes every output into `out`, which is created if
/// needed.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<RunOutcome, RunError> {
    std::fs::create_dir_all(out).map_err(|e| RunError::io(out, e))?;
    let start = Instant::now();
    let params = config.params()?;
    let cost = config.cost_spec()?;
    let result = match config.experiment {
        ExperimentKind::SolveSingleTwoPeriod => single_two_period(config, &params, &cost, out)?,
        ExperimentKind::SolveSingleInfinite => single_infinite(config, &params, &cost, out)?,
        ExperimentKind::SolveStackelberg => stackelberg(config, &params, &cost, out)?,
        ExperimentKind::SolveMpe => mpe(config, &params, &cost, out)?,
        ExperimentKind::OracleCheck => oracle_check(config, &params, &cost, out)?,
        ExperimentKind::Sweep => return crate::sweep::run_sweep(config, out),
    };
    let Output {
        artifacts,
        mut diagnostics,
        converged,
    } = result;
    diagnostics.insert("converged".into(), converged.into());
    diagnostics.insert("wall_time_s".into(), start.elapsed().as_secs_f64().into());
    let exit_code = if converged { 0 } else { EXIT_NOT_CONVERGED };
    RunManifest {
        format_version: FORMAT_VERSION,
        experiment: config.experiment.name().into(),
        config: config.echo(),
        diagnostics,
        artifacts,
        exit_code,
    }
    .write(out)?;
    Ok(RunOutcome {
        dir: out.to_path_buf(),
        converged,
        exit_code,
    })
}

fn table_artifact(dir: &Path, file: &str, table: &Table) -> Result<Artifact, RunError> {
    write_artifact(dir, file, &table.to_bytes())
}

fn json_artifact(dir: &Path, file: &str, value: &Value) -> Result<Artifact, RunError> {
    let mut text = serde_json::to_string_pretty(value).expect("json serializes");
    text.push('\n');
    write_artifact(dir, file, text.as_bytes())
}

fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::Inaction => "inaction",
        Provenance::InteriorB => "interior_b",
        Provenance::InteriorC => "interior_c",
        Provenance::Median => "median",
    }
}

fn stackelberg_name(m: StackelbergMove) -> &'static str {
    match m {
        StackelbergMove::Inaction => "inaction",
        StackelbergMove::Median => "median",
        StackelbergMove::SemiLockRight => "semi_lock_right",
        StackelbergMove::SemiLockLeft => "semi_lock_left",
    }
}

/// Benefit and cost of every first move from `p0`, as in the benefit/cost
/// decomposition figures. `objective` is the full objective net of cost.
fn profile_table(
    grid: &Grid,
    cost: &CostSpec,
    p0: f64,
    objective: impl Fn(Side, f64) -> f64 + Sync,
) -> Table {
    let mut t = Table::new(&["p1", "benefit_s0", "benefit_s1", "cost"]);
    for &q in grid.points() {
        let c = cost.evaluate(q - p0);
        t.push(vec![q, objective(Side::Zero, q) + c, objective(Side::One, q) + c, c]);
    }
    t
}

fn single_two_period(
    config: &ExperimentConfig,
    params: &ModelParams,
    cost: &CostSpec,
    out: &Path,
) -> Result<Output, RunError> {
    let grid = Grid::new(config.grid_n)?;
    let solutions: Vec<[_; 2]> = grid
        .points()
        .par_iter()
        .map(|&p| Side::BOTH.map(|s| period1_solve(params, cost, p, s)))
        .collect();

    let mut policy = Table::new(&["p", "sigma_s0", "sigma_s1"]);
    let mut value = Table::new(&["p", "v_s0", "v_s1"]);
    let mut policy2 = Table::new(&["p", "sigma_s0", "sigma_s1"]);
    let mut value2 = Table::new(&["p", "v_s0", "v_s1"]);
    let mut candidates = Vec::with_capacity(grid.len());
    for (&p, sols) in grid.points().iter().zip(&solutions) {
        policy.push(vec![p, sols[0].next, sols[1].next]);
        value.push(vec![p, sols[0].value, sols[1].value]);
        let m = Side::BOTH.map(|s| period2_solve(params, cost, p, s));
        policy2.push(vec![p, m[0].next, m[1].next]);
        value2.push(vec![p, m[0].value, m[1].value]);
        for (s, sol) in Side::BOTH.iter().zip(sols) {
            let list: Vec<Value> = sol
                .candidates
                .iter()
                .map(|c| {
                    json!({
                        "provenance": provenance_name(c.provenance),
                        "candidate": c.candidate,
                        "objective": c.objective,
                    })
                })
                .collect();
            candidates.push(json!({
                "p": p,
                "s": side_label(*s),
                "chosen": sol.next,
                "value": sol.value,
                "candidates": list,
            }));
        }
    }

    let mut artifacts = vec![
        table_artifact(out, "policy.csv", &policy)?,
        table_artifact(out, "value.csv", &value)?,
        table_artifact(out, "period2_policy.csv", &policy2)?,
        table_artifact(out, "period2_value.csv", &value2)?,
        json_artifact(out, "candidates.json", &Value::Array(candidates))?,
    ];
    if let Some(p0) = config.profile_p0 {
        let t = profile_table(&grid, cost, p0, |s, q| period1_objective(params, cost, p0, s, q));
        artifacts.push(table_artifact(out, "profile.csv", &t)?);
    }
    let mut diagnostics = Map::new();
    diagnostics.insert("delta".into(), json_number(cost.delta()));
    Ok(Output {
        artifacts,
        diagnostics,
        converged: true,
    })
}

/// JSON has no infinity; an unreachable cutoff is written as null.
fn json_number(x: f64) -> Value {
    if x.is_finite() {
        x.into()
    } else {
        Value::Null
    }
}

fn single_infinite(
    config: &ExperimentConfig,
    params: &ModelParams,
    cost: &CostSpec,
    out: &Path,
) -> Result<Output, RunError> {
    let grid = Grid::new(config.grid_n)?;
    let sol = solve_infinite(params, cost, &grid, config.tol, config.max_iter)?;
    let violations = verify_polarization_pull(&sol.values, &sol.policy);
    let artifacts = vec![
        table_artifact(out, "policy.csv", &emit::single_policy_table(&sol.policy))?,
        table_artifact(out, "value.csv", &emit::single_value_table(&sol.values))?,
    ];
    let mut diagnostics = Map::new();
    diagnostics.insert("iterations".into(), sol.iterations.into());
    diagnostics.insert("residual".into(), sol.residual.into());
    diagnostics.insert("intervention_points".into(), sol.policy.intervention_count().to_vec().into());
    diagnostics.insert("property_violations".into(), violations.len().into());
    let listed: Vec<Value> = violations
        .iter()
        .take(20)
        .map(|v| json!({"kind": format!("{:?}", v.kind), "s": side_label(v.state), "p": v.p}))
        .collect();
    diagnostics.insert("first_violations".into(), listed.into());
    Ok(Output {
        artifacts,
        diagnostics,
        converged: sol.converged,
    })
}

fn stackelberg(
    config: &ExperimentConfig,
    params: &ModelParams,
    cost: &CostSpec,
    out: &Path,
) -> Result<Output, RunError> {
    let grid = Grid::new(config.grid_n)?;
    let mut policy = Table::new(&["p", "sigma_s0", "sigma_s1"]);
    let mut value = Table::new(&["p", "v_s0", "v_s1"]);
    let mut candidates = Vec::with_capacity(grid.len());
    for &p in grid.points() {
        let sols = Side::BOTH.map(|s| stackelberg_solve(params, cost, p, s));
        policy.push(vec![p, sols[0].chosen, sols[1].chosen]);
        value.push(vec![p, sols[0].value, sols[1].value]);
        for (s, sol) in Side::BOTH.iter().zip(&sols) {
            let list: Vec<Value> = sol
                .candidates
                .iter()
                .map(|c| {
                    json!({
                        "label": stackelberg_name(c.label),
                        "candidate": c.candidate,
                        "objective": c.objective,
                    })
                })
                .collect();
            candidates.push(json!({
                "p": p,
                "s": side_label(*s),
                "chosen": sol.chosen,
                "value": sol.value,
                "phi": sol.phi_at_p0,
                "candidates": list,
            }));
        }
    }
    let mut artifacts = vec![
        table_artifact(out, "policy.csv", &policy)?,
        table_artifact(out, "value.csv", &value)?,
        json_artifact(out, "candidates.json", &Value::Array(candidates))?,
    ];
    if let Some(p0) = config.profile_p0 {
        let t = profile_table(&grid, cost, p0, |s, q| stackelberg_objective(params, cost, p0, s, q));
        artifacts.push(table_artifact(out, "profile.csv", &t)?);
    }
    let mut diagnostics = Map::new();
    diagnostics.insert("delta".into(), json_number(cost.delta()));
    Ok(Output {
        artifacts,
        diagnostics,
        converged: true,
    })
}

fn mpe(config: &ExperimentConfig, params: &ModelParams, cost: &CostSpec, out: &Path) -> Result<Output, RunError> {
    let grid = Grid::new(config.grid_n)?;
    let sol = mpe_solve(params, cost, &grid, config.horizon, config.tol)?;
    let report = check_no_deviation(params, cost, &sol);
    let artifacts = vec![
        table_artifact(out, "policy.csv", &emit::mpe_policy_table(&sol))?,
        table_artifact(out, "value.csv", &emit::mpe_value_table(&sol))?,
    ];
    let mut diagnostics = Map::new();
    diagnostics.insert("iterations".into(), sol.horizon_used.into());
    diagnostics.insert("residual".into(), sol.residual.into());
    diagnostics.insert("parity_residual".into(), sol.parity_residual.into());
    diagnostics.insert("max_deviation_gain".into(), report.max_gain.into());
    diagnostics.insert("consistency_gap".into(), report.consistency_gap.into());
    Ok(Output {
        artifacts,
        diagnostics,
        converged: sol.converged,
    })
}

/// Tolerances for the oracle comparison, in value terms.
const PERIOD2_TOL: f64 = 1e-12;
const PERIOD1_TOL: f64 = 2e-4;
const STACKELBERG_TOL: f64 = 2e-3;

fn oracle_check(
    config: &ExperimentConfig,
    params: &ModelParams,
    cost: &CostSpec,
    out: &Path,
) -> Result<Output, RunError> {
    let oracle_grid = Grid::new(config.oracle_n)?;
    let two_period = TwoPeriodOracle::new(params, cost, &oracle_grid);
    let leader = StackelbergOracle::new(params, cost, &oracle_grid);
    let h = params.h();
    let n = config.scan_n;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let p = i as f64 / (n - 1) as f64;
            Side::BOTH.map(|s| {
                let m2 = period2_solve(params, cost, p, s);
                let o2 = brute_force_one_step(|x| stage_payoff(s, x, h) - cost.evaluate(x - p), &oracle_grid);
                let m1 = period1_solve(params, cost, p, s);
                let o1 = two_period.solve(p, s);
                let st = stackelberg_solve(params, cost, p, s);
                let os = leader.solve(p, s);
                vec![
                    p,
                    s.index() as f64,
                    m2.value,
                    o2.value,
                    m1.value,
                    o1.value,
                    st.value,
                    os.value,
                ]
            })
        })
        .collect();
    let mut table = Table::new(&[
        "p",
        "s",
        "period2_value",
        "period2_oracle",
        "period1_value",
        "period1_oracle",
        "stackelberg_value",
        "stackelberg_oracle",
    ]);
    let mut gaps = [0.0f64; 3];
    for row in rows {
        for (g, j) in gaps.iter_mut().zip([2, 4, 6]) {
            *g = g.max((row[j] - row[j + 1]).abs());
        }
        table.push(row);
    }
    let passed = gaps[0] <= PERIOD2_TOL && gaps[1] <= PERIOD1_TOL && gaps[2] <= STACKELBERG_TOL;
    let mut diagnostics = Map::new();
    diagnostics.insert("max_gap_period2".into(), gaps[0].into());
    diagnostics.insert("max_gap_period1".into(), gaps[1].into());
    diagnostics.insert("max_gap_stackelberg".into(), gaps[2].into());
    diagnostics.insert(
        "tolerances".into(),
        json!({"period2": PERIOD2_TOL, "period1": PERIOD1_TOL, "stackelberg": STACKELBERG_TOL}),
    );
    diagnostics.insert("passed".into(), passed.into());
    Ok(Output {
        artifacts: vec![table_artifact(out, "oracle_check.csv", &table)?],
        diagnostics,
        converged: passed,
    })
}
