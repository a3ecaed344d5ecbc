//! Infinite-horizon single-elite problem solved by value iteration on the
//! grid.

use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::grid::Grid;
use crate::model::{CostSpec, ModelParams, Side};
use crate::search::{best_move, cost_table, max_of};

/// Value functions `V_0`, `V_1` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    grid: Grid,
    values: [Vec<f64>; 2],
}

impl ValueTable {
    pub fn new(grid: &Grid, v0: Vec<f64>, v1: Vec<f64>) -> Result<Self> {
        for v in [&v0, &v1] {
            if v.len() != grid.len() {
                return Err(ModelError::LengthMismatch {
                    expected: grid.len(),
                    got: v.len(),
                });
            }
        }
        Ok(Self {
            grid: grid.clone(),
            values: [v0, v1],
        })
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: [vec![c; grid.len()], vec![c; grid.len()]],
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self, s: Side) -> &[f64] {
        &self.values[s.index()]
    }

    pub fn get(&self, s: Side, i: usize) -> f64 {
        self.values[s.index()][i]
    }

    /// Sup-norm distance to another table on the same grid.
    pub fn sup_distance(&self, other: &ValueTable) -> f64 {
        Side::BOTH
            .iter()
            .flat_map(|&s| self.values(s).iter().zip(other.values(s)))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ValueTable {
        Self {
            grid: self.grid.clone(),
            values: [
                self.values[0].iter().map(|&v| f(v)).collect(),
                self.values[1].iter().map(|&v| f(v)).collect(),
            ],
        }
    }
}

/// Chosen next-period grid index for every state and grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    grid: Grid,
    choices: [Vec<usize>; 2],
}

impl PolicyTable {
    pub fn new(grid: &Grid, sigma0: Vec<usize>, sigma1: Vec<usize>) -> Result<Self> {
        for sigma in [&sigma0, &sigma1] {
            if sigma.len() != grid.len() {
                return Err(ModelError::LengthMismatch {
                    expected: grid.len(),
                    got: sigma.len(),
                });
            }
            if let Some(&bad) = sigma.iter().find(|&&j| j >= grid.len()) {
                return Err(ModelError::OffGrid(bad as f64));
            }
        }
        Ok(Self {
            grid: grid.clone(),
            choices: [sigma0, sigma1],
        })
    }

    /// Builds a table from chosen shares, each of which must be a grid point.
    pub fn from_shares(grid: &Grid, sigma0: &[f64], sigma1: &[f64]) -> Result<Self> {
        let to_idx = |xs: &[f64]| xs.iter().map(|&x| grid.index_of(x)).collect::<Result<Vec<_>>>();
        Self::new(grid, to_idx(sigma0)?, to_idx(sigma1)?)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn indices(&self, s: Side) -> &[usize] {
        &self.choices[s.index()]
    }

    pub fn index(&self, s: Side, i: usize) -> usize {
        self.choices[s.index()][i]
    }

    pub fn share(&self, s: Side, i: usize) -> f64 {
        self.grid.point(self.index(s, i))
    }

    pub fn shares(&self, s: Side) -> Vec<f64> {
        self.indices(s).iter().map(|&j| self.grid.point(j)).collect()
    }

    /// Number of grid points where the elite moves, per state.
    pub fn intervention_count(&self) -> [usize; 2] {
        Side::BOTH.map(|s| {
            self.indices(s)
                .iter()
                .enumerate()
                .filter(|(i, j)| i != *j)
                .count()
        })
    }
}

/// The Bellman operator `T` for a fixed parameter set, cost and grid.
#[derive(Debug, Clone)]
pub struct BellmanOperator {
    params: ModelParams,
    grid: Grid,
    costs: Vec<f64>,
}

impl BellmanOperator {
    pub fn new(params: &ModelParams, cost: &CostSpec, grid: &Grid) -> Self {
        Self {
            params: *params,
            grid: grid.clone(),
            costs: cost_table(cost, grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `R(s, p') + beta [pi v_1(p') + (1 - pi) v_0(p')]` for every grid `p'`.
    fn gains(&self, v: &ValueTable, s: Side) -> Vec<f64> {
        let (pi, beta, h) = (self.params.pi(), self.params.beta(), self.params.h());
        let mid = self.grid.mid();
        let (v0, v1) = (v.values(Side::Zero), v.values(Side::One));
        (0..self.grid.len())
            .map(|j| {
                let on_side = match s {
                    Side::One => j >= mid,
                    Side::Zero => j <= mid,
                };
                let stage = if on_side { h } else { 0.0 };
                stage + beta * (pi * v1[j] + (1.0 - pi) * v0[j])
            })
            .collect()
    }

    /// One-step maximizer and value from grid index `i` in state `s`.
    pub fn one_step(&self, v: &ValueTable, s: Side, i: usize) -> (usize, f64) {
        let gain = self.gains(v, s);
        best_move(&gain, max_of(&gain), &self.costs, i, self.grid.mid())
    }

    /// Applies `T` and records the greedy policy.
    pub fn apply_with_policy(&self, v: &ValueTable) -> (ValueTable, PolicyTable) {
        let mid = self.grid.mid();
        let mut values: [Vec<f64>; 2] = Default::default();
        let mut choices: [Vec<usize>; 2] = Default::default();
        for s in Side::BOTH {
            let gain = self.gains(v, s);
            let gmax = max_of(&gain);
            let (sigma, vals): (Vec<usize>, Vec<f64>) = (0..self.grid.len())
                .into_par_iter()
                .map(|i| best_move(&gain, gmax, &self.costs, i, mid))
                .unzip();
            values[s.index()] = vals;
            choices[s.index()] = sigma;
        }
        (
            ValueTable {
                grid: self.grid.clone(),
                values,
            },
            PolicyTable {
                grid: self.grid.clone(),
                choices,
            },
        )
    }

    pub fn apply(&self, v: &ValueTable) -> ValueTable {
        self.apply_with_policy(v).0
    }
}

/// `T(v)`: one synchronous Bellman sweep over the grid.
pub fn bellman_apply(params: &ModelParams, cost: &CostSpec, grid: &Grid, v: &ValueTable) -> ValueTable {
    BellmanOperator::new(params, cost, grid).apply(v)
}

#[derive(Debug, Clone)]
pub struct InfiniteHorizonSolution {
    pub values: ValueTable,
    pub policy: PolicyTable,
    /// Sup-norm change of the last sweep.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Value iteration from `v = 0` until the sweep-to-sweep sup-norm change is
/// at most `tol`. The returned policy is greedy with respect to the final
/// values. A run that exhausts `max_iter` is returned with
/// `converged == false`.
pub fn solve_infinite(
    params: &ModelParams,
    cost: &CostSpec,
    grid: &Grid,
    tol: f64,
    max_iter: usize,
) -> Result<InfiniteHorizonSolution> {
    if !(tol > 0.0) {
        return Err(ModelError::OutOfRange {
            name: "tol",
            value: tol,
            expected: "(0, inf)",
        });
    }
    let op = BellmanOperator::new(params, cost, grid);
    let mut v = ValueTable::zeros(grid);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let next = op.apply(&v);
        residual = next.sup_distance(&v);
        v = next;
        iterations += 1;
        if residual <= tol {
            break;
        }
    }
    let (_, policy) = op.apply_with_policy(&v);
    Ok(InfiniteHorizonSolution {
        values: v,
        policy,
        residual,
        iterations,
        converged: residual <= tol,
    })
}

/// Iteration count after which the contraction bound guarantees a sweep
/// change of at most `tol`: the smallest `n` with `beta^n H <= tol`.
pub fn contraction_iteration_bound(params: &ModelParams, tol: f64) -> usize {
    ((tol / params.h()).ln() / params.beta().ln()).ceil().max(0.0) as usize + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// The move leaves `[min(p, 1/2), max(p, 1/2)]`.
    Pull,
    /// The value function is not peaked at one half.
    ValuePeak,
    /// The policy decreases by more than one grid step on one side.
    PolicyMonotone,
    /// One half is not absorbing.
    MedianNotAbsorbing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub state: Side,
    pub index: usize,
    pub p: f64,
}

/// Tolerance for the peak check on values.
pub const PEAK_TOLERANCE: f64 = 1e-9;

/// Checks the structural properties of a converged solution and returns
/// every violation found. An empty list means all properties hold.
pub fn verify_polarization_pull(values: &ValueTable, policy: &PolicyTable) -> Vec<Violation> {
    let grid = policy.grid();
    let mid = grid.mid();
    let n = grid.len();
    let mut out = Vec::new();
    for s in Side::BOTH {
        let sigma = policy.indices(s);
        let v = values.values(s);
        let mut flag = |kind, index| {
            out.push(Violation {
                kind,
                state: s,
                index,
                p: grid.point(index),
            })
        };
        for i in 0..n {
            let (lo, hi) = (i.min(mid), i.max(mid));
            if sigma[i] < lo || sigma[i] > hi {
                flag(ViolationKind::Pull, i);
            }
        }
        if sigma[mid] != mid {
            flag(ViolationKind::MedianNotAbsorbing, mid);
        }
        for i in 0..n - 1 {
            let peak_ok = if i < mid {
                v[i + 1] >= v[i] - PEAK_TOLERANCE
            } else {
                v[i + 1] <= v[i] + PEAK_TOLERANCE
            };
            if !peak_ok {
                flag(ViolationKind::ValuePeak, i + 1);
            }
            // weakly increasing on each side, hence on the whole grid
            if sigma[i + 1] + 1 < sigma[i] {
                flag(ViolationKind::PolicyMonotone, i + 1);
            }
        }
    }
    out
}
