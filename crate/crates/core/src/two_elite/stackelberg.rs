//! Two-period game: elite A moves first, elite B responds.

use crate::model::{CostSpec, ModelParams, Side};
use crate::single_elite::pick_best;
use crate::two_elite::{elite_payoff, Elite};

/// B's period-two move: stay if the standing policy already suits B, flip to
/// one half when that costs strictly less than `H`, otherwise stay.
pub fn elite_b_response(_params: &ModelParams, cost: &CostSpec, p1: f64, s2: Side) -> f64 {
    let wanted = Elite::B.preferred(s2);
    let standing = crate::model::implemented_policy(p1, wanted);
    if standing == wanted {
        p1
    } else if (0.5 - p1).abs() < cost.delta() {
        0.5
    } else {
        p1
    }
}

/// A's expected period-two payoff after leaving the share at `p0`, given
/// B's response.
pub fn phi_continuation(params: &ModelParams, cost: &CostSpec, p0: f64) -> f64 {
    let delta = cost.delta();
    if p0 <= 0.5 - delta {
        (1.0 - params.pi()) * params.h()
    } else if p0 >= 0.5 + delta {
        params.pi() * params.h()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StackelbergMove {
    Inaction,
    Median,
    SemiLockRight,
    SemiLockLeft,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackelbergCandidate {
    pub label: StackelbergMove,
    pub candidate: f64,
    /// `None` when the target lies outside `[0, 1]`.
    pub objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackelbergSolution {
    pub chosen: f64,
    pub value: f64,
    pub candidates: Vec<StackelbergCandidate>,
    pub phi_at_p0: f64,
}

/// A's full two-period objective for an arbitrary first move `p1`, with B
/// responding via [`elite_b_response`].
pub fn stackelberg_objective(params: &ModelParams, cost: &CostSpec, p0: f64, s1: Side, p1: f64) -> f64 {
    let h = params.h();
    let next: f64 = Side::BOTH
        .iter()
        .map(|&s2| {
            let p2 = elite_b_response(params, cost, p1, s2);
            params.prob(s2) * elite_payoff(Elite::A, Elite::B, s2, p2, h)
        })
        .sum();
    elite_payoff(Elite::A, Elite::A, s1, p1, h) - cost.evaluate(p1 - p0) + params.beta() * next
}

/// Compares inaction, the median and the two semi-lock points `1/2 +- delta`.
pub fn stackelberg_solve(params: &ModelParams, cost: &CostSpec, p0: f64, s1: Side) -> StackelbergSolution {
    let (h, beta, pi) = (params.h(), params.beta(), params.pi());
    let delta = cost.delta();
    let phi = phi_continuation(params, cost, p0);
    let u_a = |y: Side| if y == s1 { h } else { 0.0 };

    let right = 0.5 + delta;
    let left = 0.5 - delta;
    let feasible = |x: f64| (0.0..=1.0).contains(&x);

    let candidates = vec![
        StackelbergCandidate {
            label: StackelbergMove::Inaction,
            candidate: p0,
            objective: Some(elite_payoff(Elite::A, Elite::A, s1, p0, h) + beta * phi),
        },
        StackelbergCandidate {
            label: StackelbergMove::Median,
            candidate: 0.5,
            objective: Some(h - cost.evaluate(p0 - 0.5)),
        },
        StackelbergCandidate {
            label: StackelbergMove::SemiLockRight,
            candidate: right,
            objective: feasible(right).then(|| u_a(Side::One) - cost.evaluate(right - p0) + beta * pi * h),
        },
        StackelbergCandidate {
            label: StackelbergMove::SemiLockLeft,
            candidate: left,
            objective: feasible(left)
                .then(|| u_a(Side::Zero) - cost.evaluate(p0 - left) + beta * (1.0 - pi) * h),
        },
    ];
    let best = pick_best(
        p0,
        candidates
            .iter()
            .filter_map(|c| c.objective.map(|v| (c.candidate, v))),
    );
    StackelbergSolution {
        chosen: best.next,
        value: best.value,
        candidates,
        phi_at_p0: phi,
    }
}
