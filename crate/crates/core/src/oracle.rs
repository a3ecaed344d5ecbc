//! Brute-force maximizers over a fine grid, built from the payoff, cost and
//! majority-rule primitives alone. They exist to check the closed-form
//! solvers.

use rayon::prelude::*;

use crate::grid::Grid;
use crate::model::{implemented_policy, CostSpec, ModelParams, Side};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub argmax: f64,
    pub value: f64,
    pub evaluations: usize,
}

fn argmax_lowest(values: impl Iterator<Item = f64>) -> (usize, f64, usize) {
    let mut best = (0, f64::NEG_INFINITY);
    let mut count = 0;
    for (j, v) in values.enumerate() {
        count += 1;
        if v > best.1 {
            best = (j, v);
        }
    }
    (best.0, best.1, count)
}

/// Maximizes `objective` over every grid point; ties go to the lowest index.
pub fn brute_force_one_step(objective: impl Fn(f64) -> f64, grid: &Grid) -> OracleResult {
    let (j, value, evaluations) = argmax_lowest(grid.points().iter().map(|&x| objective(x)));
    OracleResult {
        argmax: grid.point(j),
        value,
        evaluations,
    }
}

/// `h` when the policy implemented at `p` is `winner_wants`; at one half the
/// mover's preference decides.
fn reward(mover_wants: Side, winner_wants: Side, p: f64, h: f64) -> f64 {
    if implemented_policy(p, mover_wants) == winner_wants {
        h
    } else {
        0.0
    }
}

/// Single elite over two periods, with the period-two maximum over the
/// oracle grid tabulated once for every period-one landing point.
#[derive(Debug, Clone)]
pub struct TwoPeriodOracle {
    params: ModelParams,
    cost: CostSpec,
    grid: Grid,
    /// `E_{s2}[max_x u(y(x), s2) - c(x - p1)]` for every grid `p1`.
    continuation: Vec<f64>,
}

impl TwoPeriodOracle {
    pub fn new(params: &ModelParams, cost: &CostSpec, grid: &Grid) -> Self {
        let h = params.h();
        let pts = grid.points();
        let continuation = pts
            .par_iter()
            .map(|&p1| {
                Side::BOTH
                    .iter()
                    .map(|&s2| {
                        let best = pts
                            .iter()
                            .map(|&x| reward(s2, s2, x, h) - cost.evaluate(x - p1))
                            .fold(f64::NEG_INFINITY, f64::max);
                        params.prob(s2) * best
                    })
                    .sum()
            })
            .collect();
        Self {
            params: *params,
            cost: cost.clone(),
            grid: grid.clone(),
            continuation,
        }
    }

    pub fn solve(&self, p0: f64, s1: Side) -> OracleResult {
        let (h, beta) = (self.params.h(), self.params.beta());
        let (j, value, evaluations) = argmax_lowest(self.grid.points().iter().zip(&self.continuation).map(
            |(&p1, &cont)| reward(s1, s1, p1, h) - self.cost.evaluate(p1 - p0) + beta * cont,
        ));
        OracleResult {
            argmax: self.grid.point(j),
            value,
            evaluations,
        }
    }
}

pub fn brute_force_two_period_single(
    params: &ModelParams,
    cost: &CostSpec,
    p0: f64,
    s1: Side,
    grid: &Grid,
) -> OracleResult {
    TwoPeriodOracle::new(params, cost, grid).solve(p0, s1)
}

/// Elite A moves, then elite B best-responds by scanning the oracle grid.
/// B keeps the current share whenever no move is strictly better, and
/// otherwise takes the lowest-index maximizer.
#[derive(Debug, Clone)]
pub struct StackelbergOracle {
    params: ModelParams,
    cost: CostSpec,
    grid: Grid,
    /// `E_{s2}[u_A(after B's response from p1)]` for every grid `p1`.
    continuation: Vec<f64>,
}

impl StackelbergOracle {
    pub fn new(params: &ModelParams, cost: &CostSpec, grid: &Grid) -> Self {
        let h = params.h();
        let pts = grid.points();
        let continuation = pts
            .par_iter()
            .map(|&p1| {
                Side::BOTH
                    .iter()
                    .map(|&s2| {
                        let b_wants = s2.flip();
                        let stay = reward(b_wants, b_wants, p1, h);
                        let (mut x_best, mut v_best) = (p1, stay);
                        for &x in pts {
                            let v = reward(b_wants, b_wants, x, h) - cost.evaluate(x - p1);
                            if v > v_best {
                                x_best = x;
                                v_best = v;
                            }
                        }
                        params.prob(s2) * reward(b_wants, s2, x_best, h)
                    })
                    .sum()
            })
            .collect();
        Self {
            params: *params,
            cost: cost.clone(),
            grid: grid.clone(),
            continuation,
        }
    }

    pub fn solve(&self, p0: f64, s1: Side) -> OracleResult {
        let (h, beta) = (self.params.h(), self.params.beta());
        let (j, value, evaluations) = argmax_lowest(self.grid.points().iter().zip(&self.continuation).map(
            |(&p1, &cont)| reward(s1, s1, p1, h) - self.cost.evaluate(p1 - p0) + beta * cont,
        ));
        OracleResult {
            argmax: self.grid.point(j),
            value,
            evaluations,
        }
    }
}

pub fn brute_force_stackelberg(
    params: &ModelParams,
    cost: &CostSpec,
    p0: f64,
    s1: Side,
    grid: &Grid,
) -> OracleResult {
    StackelbergOracle::new(params, cost, grid).solve(p0, s1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::stage_payoff;

    fn setup(k: f64) -> (ModelParams, CostSpec, Grid) {
        (
            ModelParams::new(0.5, 0.9, 1.0).unwrap(),
            CostSpec::quadratic(k, 1.0).unwrap(),
            Grid::new(2001).unwrap(),
        )
    }

    #[test]
    fn one_step_examples() {
        let r = brute_force_one_step(|x| -(x - 0.3).powi(2), &Grid::new(10001).unwrap());
        assert!((r.argmax - 0.3).abs() < 1e-12);
        assert!(r.value.abs() < 1e-24);
        assert_eq!(r.evaluations, 10001);

        let g = Grid::new(2001).unwrap();
        let r = brute_force_one_step(|x| stage_payoff(Side::One, x, 1.0) - 10.0 * (x - 0.4).powi(2), &g);
        assert_eq!(r.argmax, 0.5);
        assert!((r.value - 0.9).abs() < 1e-12);

        assert_eq!(brute_force_one_step(|_| 1.0, &g).argmax, 0.0);
    }

    #[test]
    fn two_period_examples() {
        let (params, cost, grid) = setup(10.0);
        let oracle = TwoPeriodOracle::new(&params, &cost, &grid);
        let r = oracle.solve(0.3, Side::Zero);
        assert!((r.value - 1.775_862).abs() < 2e-4, "{r:?}");
        assert!((r.argmax - 0.362_069).abs() < 1e-3);
        let r = oracle.solve(0.5, Side::One);
        assert!((r.value - 1.9).abs() < 1e-12);
    }

    #[test]
    fn two_period_prohibitive_cost_stays() {
        let (params, cost, grid) = setup(1e6);
        let p0 = grid.point(600);
        let r = brute_force_two_period_single(&params, &cost, p0, Side::One, &grid);
        assert_eq!(r.argmax, p0);
        assert!((r.value - 0.9 * 0.5).abs() < 1e-12);
    }

    #[test]
    fn stackelberg_examples() {
        let (params, cost, grid) = setup(10.0);
        let oracle = StackelbergOracle::new(&params, &cost, &grid);
        let r = oracle.solve(0.35, Side::Zero);
        assert!((r.value - 1.173_683).abs() < 2e-3, "{r:?}");
        assert!((r.argmax - 0.183_772).abs() < 1e-3);
        let p0 = grid.point(1800);
        let r = oracle.solve(p0, Side::One);
        assert_eq!(r.argmax, p0);
        assert!((r.value - 1.45).abs() < 1e-12);
    }

    #[test]
    fn stackelberg_prohibitive_cost_stays() {
        let (params, cost, grid) = setup(1e6);
        let oracle = StackelbergOracle::new(&params, &cost, &grid);
        for p0 in [0, 500, 1000, 1400].map(|i| grid.point(i)) {
            for s1 in Side::BOTH {
                assert_eq!(oracle.solve(p0, s1).argmax, p0);
            }
        }
    }
}
