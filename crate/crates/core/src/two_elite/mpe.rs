//! Markov-perfect equilibrium for two elites alternating in power, computed
//! by finite-horizon backward induction on the grid.

use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::grid::Grid;
use crate::model::{CostSpec, ModelParams, Side};
use crate::search::{best_move, cost_table, max_of};
use crate::two_elite::Elite;

/// Equilibrium tables. `v[e][s]` is elite `e`'s value when it moves in state
/// `s`, `u[e]` its value while the rival is about to move, and `sigma[e][s]`
/// the grid index it moves to.
#[derive(Debug, Clone, PartialEq)]
pub struct MpeSolution {
    pub grid: Grid,
    pub v: [[Vec<f64>; 2]; 2],
    pub u: [Vec<f64>; 2],
    pub sigma: [[Vec<usize>; 2]; 2],
    pub horizon_used: usize,
    /// Sup-norm change of the value tables in the last backward step.
    pub residual: f64,
    /// Sup-norm change over the last two backward steps. It vanishes while
    /// `residual` does not when the recursion settles into a two-period
    /// cycle, so that the answer depends on who moves last.
    pub parity_residual: f64,
    pub converged: bool,
}

impl MpeSolution {
    pub fn mover_values(&self, e: Elite, s: Side) -> &[f64] {
        &self.v[e.index()][s.index()]
    }

    pub fn waiting_values(&self, e: Elite) -> &[f64] {
        &self.u[e.index()]
    }

    pub fn policy(&self, e: Elite, s: Side) -> &[usize] {
        &self.sigma[e.index()][s.index()]
    }

    pub fn policy_shares(&self, e: Elite, s: Side) -> Vec<f64> {
        self.policy(e, s).iter().map(|&j| self.grid.point(j)).collect()
    }
}

/// Largest profitable one-step deviation found by [`check_no_deviation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationReport {
    /// Best attainable mover value minus the value of the recorded move.
    pub max_gain: f64,
    pub elite: Elite,
    pub state: Side,
    pub index: usize,
    /// Largest mismatch between the stored tables and the values implied by
    /// the stored policies.
    pub consistency_gap: f64,
}

struct Stepper<'a> {
    params: &'a ModelParams,
    grid: &'a Grid,
    costs: Vec<f64>,
}

impl Stepper<'_> {
    /// B works in mirrored coordinates so that both elites break ties the
    /// same way relative to their own preferred side.
    fn orient(&self, e: Elite, i: usize) -> usize {
        match e {
            Elite::A => i,
            Elite::B => self.grid.mirror(i),
        }
    }

    fn payoff(&self, e: Elite, mover: Elite, s: Side, j: usize) -> f64 {
        let mid = self.grid.mid();
        let y = if j > mid {
            Side::One
        } else if j < mid {
            Side::Zero
        } else {
            mover.preferred(s)
        };
        if y == e.preferred(s) {
            self.params.h()
        } else {
            0.0
        }
    }

    /// Move values `payoff - cost + beta u_e` for every target, in `e`'s
    /// orientation.
    fn gains(&self, e: Elite, s: Side, u_e: &[f64]) -> Vec<f64> {
        let beta = self.params.beta();
        (0..self.grid.len())
            .map(|jo| {
                let j = self.orient(e, jo);
                self.payoff(e, e, s, j) + beta * u_e[j]
            })
            .collect()
    }

    fn mover(&self, e: Elite, s: Side, u_e: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let gains = self.gains(e, s, u_e);
        let gmax = max_of(&gains);
        let mid = self.grid.mid();
        let (vals, sigma): (Vec<f64>, Vec<usize>) = (0..self.grid.len())
            .into_par_iter()
            .map(|i| {
                let (jo, v) = best_move(&gains, gmax, &self.costs, self.orient(e, i), mid);
                (v, self.orient(e, jo))
            })
            .unzip();
        (vals, sigma)
    }

    fn waiting(&self, e: Elite, v_e: &[Vec<f64>; 2], sigma_rival: &[Vec<usize>; 2]) -> Vec<f64> {
        let (pi, beta) = (self.params.pi(), self.params.beta());
        let rival = e.rival();
        (0..self.grid.len())
            .map(|i| {
                Side::BOTH
                    .iter()
                    .map(|&s| {
                        let j = sigma_rival[s.index()][i];
                        let cont = pi * v_e[1][j] + (1.0 - pi) * v_e[0][j];
                        self.params.prob(s) * (self.payoff(e, rival, s, j) + beta * cont)
                    })
                    .sum()
            })
            .collect()
    }
}

fn sup_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

type Tables = ([[Vec<f64>; 2]; 2], [Vec<f64>; 2]);

fn table_distance(a: &Tables, b: &Tables) -> f64 {
    Elite::BOTH
        .iter()
        .flat_map(|&e| {
            let k = e.index();
            [
                sup_change(&a.0[k][0], &b.0[k][0]),
                sup_change(&a.0[k][1], &b.0[k][1]),
                sup_change(&a.1[k], &b.1[k]),
            ]
        })
        .fold(0.0, f64::max)
}

/// Backward induction from zero terminal values for at most `horizon`
/// periods, stopping early once no value table moves by more than
/// `residual_tol` between consecutive periods.
///
/// Each step adds one period in front of the game. The mover tables come
/// from the waiting values one period later, and the waiting values from
/// the rival's new policy and the mover tables one period later. Both
/// first-mover orders are carried at once, which keeps the role-swap
/// mirror exact.
pub fn mpe_solve(
    params: &ModelParams,
    cost: &CostSpec,
    grid: &Grid,
    horizon: usize,
    residual_tol: f64,
) -> Result<MpeSolution> {
    if horizon < 2 {
        return Err(ModelError::OutOfRange {
            name: "horizon",
            value: horizon as f64,
            expected: "[2, inf)",
        });
    }
    if !(residual_tol > 0.0) {
        return Err(ModelError::OutOfRange {
            name: "residual_tol",
            value: residual_tol,
            expected: "(0, inf)",
        });
    }
    let stepper = Stepper {
        params,
        grid,
        costs: cost_table(cost, grid),
    };
    let n = grid.len();
    let zeros = || [vec![0.0; n], vec![0.0; n]];
    let mut current: Tables = ([zeros(), zeros()], zeros());
    let mut previous: Option<Tables> = None;
    let mut sigma: [[Vec<usize>; 2]; 2] = Default::default();
    let mut residual = f64::INFINITY;
    let mut parity_residual = f64::INFINITY;
    let mut steps = 0;

    while steps < horizon {
        let (v, u) = &current;
        let mut next_v = [zeros(), zeros()];
        let mut next_sigma: [[Vec<usize>; 2]; 2] = Default::default();
        for e in Elite::BOTH {
            for s in Side::BOTH {
                let (vals, pol) = stepper.mover(e, s, &u[e.index()]);
                next_v[e.index()][s.index()] = vals;
                next_sigma[e.index()][s.index()] = pol;
            }
        }
        let next_u = Elite::BOTH.map(|e| stepper.waiting(e, &v[e.index()], &next_sigma[e.rival().index()]));
        let next: Tables = (next_v, next_u);

        residual = table_distance(&next, &current);
        if let Some(prev) = &previous {
            parity_residual = table_distance(&next, prev);
        }
        previous = Some(std::mem::replace(&mut current, next));
        sigma = next_sigma;
        steps += 1;
        if residual <= residual_tol {
            break;
        }
    }

    let (v, u) = current;
    Ok(MpeSolution {
        grid: grid.clone(),
        v,
        u,
        sigma,
        horizon_used: steps,
        residual,
        parity_residual,
        converged: residual <= residual_tol,
    })
}

/// Recomputes every mover's best one-step move against the stored waiting
/// values and reports the largest gain over the recorded move.
pub fn check_no_deviation(params: &ModelParams, cost: &CostSpec, sol: &MpeSolution) -> DeviationReport {
    let grid = &sol.grid;
    let stepper = Stepper {
        params,
        grid,
        costs: cost_table(cost, grid),
    };
    let beta = params.beta();
    let mut report = DeviationReport {
        max_gain: f64::NEG_INFINITY,
        elite: Elite::A,
        state: Side::Zero,
        index: 0,
        consistency_gap: 0.0,
    };
    for e in Elite::BOTH {
        let u_e = &sol.u[e.index()];
        for s in Side::BOTH {
            let (best, _) = stepper.mover(e, s, u_e);
            let sigma = sol.policy(e, s);
            let recorded = sol.mover_values(e, s);
            for i in 0..grid.len() {
                let j = sigma[i];
                let psi = stepper.payoff(e, e, s, j) - stepper.costs[i.abs_diff(j)] + beta * u_e[j];
                let gain = best[i] - psi;
                if gain > report.max_gain {
                    report.max_gain = gain;
                    report.elite = e;
                    report.state = s;
                    report.index = i;
                }
                report.consistency_gap = report.consistency_gap.max((psi - recorded[i]).abs());
            }
        }
        let implied = stepper.waiting(e, &sol.v[e.index()], &sol.sigma[e.rival().index()]);
        report.consistency_gap = report.consistency_gap.max(sup_change(&implied, u_e));
    }
    report
}
