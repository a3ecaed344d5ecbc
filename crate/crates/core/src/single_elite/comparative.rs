//! Comparing one-step moves under two persuasion technologies.

use crate::error::{ModelError, Result};
use crate::grid::Grid;
use crate::model::{cost_dominates, CostSpec, ModelParams, Side};
use crate::single_elite::infinite::{solve_infinite, BellmanOperator, PolicyTable};

/// Which continuation values the two technologies are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuationMode {
    /// Both one-step problems use the converged values of the cheaper cost.
    Shared,
    /// Each technology uses its own converged values.
    Resolved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkViolation {
    pub state: Side,
    pub index: usize,
    pub p: f64,
    pub base_choice: f64,
    pub costlier_choice: f64,
}

#[derive(Debug, Clone)]
pub struct CostComparison {
    pub mode: ContinuationMode,
    /// One-step maximizers under the cheaper cost.
    pub base: PolicyTable,
    /// One-step maximizers under the dominating cost.
    pub costlier: PolicyTable,
    /// Points where the costlier move is larger by more than one grid step.
    pub violations: Vec<ShrinkViolation>,
    pub converged: bool,
}

/// Solves with `cost_c` and `cost_ctilde` and checks that the costlier
/// technology never moves further toward one half, allowing one grid step
/// of slack. Identical costs are accepted and give identical maximizers.
pub fn compare_cost_technologies(
    params: &ModelParams,
    cost_c: &CostSpec,
    cost_ctilde: &CostSpec,
    grid: &Grid,
    mode: ContinuationMode,
    tol: f64,
    max_iter: usize,
) -> Result<CostComparison> {
    let identical = cost_c.function() == cost_ctilde.function();
    if !identical && !cost_dominates(cost_ctilde.function(), cost_c.function(), grid.points())? {
        return Err(ModelError::NotCostDominant {
            c_tilde: cost_ctilde.function().to_string(),
            c: cost_c.function().to_string(),
        });
    }

    let base_sol = solve_infinite(params, cost_c, grid, tol, max_iter)?;
    let (costlier, converged) = match mode {
        ContinuationMode::Shared => {
            let op = BellmanOperator::new(params, cost_ctilde, grid);
            (op.apply_with_policy(&base_sol.values).1, base_sol.converged)
        }
        ContinuationMode::Resolved => {
            let sol = solve_infinite(params, cost_ctilde, grid, tol, max_iter)?;
            (sol.policy, base_sol.converged && sol.converged)
        }
    };
    let base = base_sol.policy;

    let mid = grid.mid();
    let mut violations = Vec::new();
    for s in Side::BOTH {
        for i in 0..grid.len() {
            let (b, t) = (base.index(s, i), costlier.index(s, i));
            let left_ok = i > mid || t <= b + 1;
            let right_ok = i < mid || t + 1 >= b;
            if !(left_ok && right_ok) {
                violations.push(ShrinkViolation {
                    state: s,
                    index: i,
                    p: grid.point(i),
                    base_choice: grid.point(b),
                    costlier_choice: grid.point(t),
                });
            }
        }
    }
    Ok(CostComparison {
        mode,
        base,
        costlier,
        violations,
        converged,
    })
}
