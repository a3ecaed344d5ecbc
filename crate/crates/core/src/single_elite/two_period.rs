//! Closed-form two-period solution for a single elite.

use crate::model::{stage_payoff, CostFunction, CostSpec, ModelParams, Side};
use crate::search::golden_section_minimize;

/// Cutoffs `1/2 - delta` and `1/2 + delta` splitting `[0, 1]` into the
/// regions A = `[0, p0*]`, B = `[p0*, 1/2]`, C = `[1/2, p1*]`, D = `[p1*, 1]`.
///
/// With an infinite `delta` the cutoffs are infinite and A, D are empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPartition {
    pub p0_star: f64,
    pub p1_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    A,
    B,
    C,
    D,
}

impl RegionPartition {
    pub fn new(cost: &CostSpec) -> Self {
        let delta = cost.delta();
        Self {
            p0_star: 0.5 - delta,
            p1_star: 0.5 + delta,
        }
    }

    /// Region containing `p`; shared boundaries resolve to B or C.
    pub fn region_of(&self, p: f64) -> Region {
        if p < self.p0_star {
            Region::A
        } else if p <= 0.5 {
            Region::B
        } else if p <= self.p1_star {
            Region::C
        } else {
            Region::D
        }
    }

    /// Region B clamped to `[0, 1]`.
    pub fn b_interval(&self) -> (f64, f64) {
        (self.p0_star.max(0.0), 0.5)
    }

    /// Region C clamped to `[0, 1]`.
    pub fn c_interval(&self) -> (f64, f64) {
        (0.5, self.p1_star.min(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Inaction,
    InteriorB,
    InteriorC,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEvaluation {
    pub candidate: f64,
    pub objective: f64,
    pub provenance: Provenance,
}

/// A chosen next-period share and the value it attains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub next: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodOneSolution {
    pub next: f64,
    pub value: f64,
    pub candidates: Vec<CandidateEvaluation>,
}

/// `E_s'[V_{2,s'}(p')]`, piecewise over the four regions.
pub fn expected_continuation_2(params: &ModelParams, cost: &CostSpec, p_next: f64) -> f64 {
    let h = params.h();
    let pi = params.pi();
    match RegionPartition::new(cost).region_of(p_next) {
        Region::A => h * (1.0 - pi),
        Region::B => h - pi * cost.evaluate(0.5 - p_next),
        Region::C => h - (1.0 - pi) * cost.evaluate(p_next - 0.5),
        Region::D => h * pi,
    }
}

/// Last-period choice: stay when already on the preferred side or when the
/// flip costs at least `H`, otherwise move exactly to one half.
pub fn period2_solve(params: &ModelParams, cost: &CostSpec, p: f64, s: Side) -> Move {
    let h = params.h();
    let regions = RegionPartition::new(cost);
    let (preferred_side, worth_moving) = match s {
        Side::One => (p >= 0.5, p > regions.p0_star),
        Side::Zero => (p <= 0.5, p < regions.p1_star),
    };
    if preferred_side {
        Move { next: p, value: h }
    } else if worth_moving {
        Move {
            next: 0.5,
            value: h - cost.evaluate(0.5 - p),
        }
    } else {
        Move { next: p, value: 0.0 }
    }
}

fn interior_minimizer(cost: &CostSpec, p: f64, weight: f64, interval: (f64, f64)) -> f64 {
    let (lo, hi) = interval;
    match cost.function() {
        CostFunction::Quadratic { .. } => ((p + 0.5 * weight) / (1.0 + weight)).clamp(lo, hi),
        CostFunction::Custom(_) => golden_section_minimize(
            |q| cost.evaluate(q - p) + weight * cost.evaluate(0.5 - q),
            lo,
            hi,
            1e-12,
        ),
    }
}

/// Minimizer of `c(q - p) + beta pi c(1/2 - q)` over region B.
pub fn interior_minimizer_b(params: &ModelParams, cost: &CostSpec, p: f64) -> f64 {
    let weight = params.beta() * params.pi();
    interior_minimizer(cost, p, weight, RegionPartition::new(cost).b_interval())
}

/// Minimizer of `c(q - p) + beta (1 - pi) c(q - 1/2)` over region C.
pub fn interior_minimizer_c(params: &ModelParams, cost: &CostSpec, p: f64) -> f64 {
    let weight = params.beta() * (1.0 - params.pi());
    interior_minimizer(cost, p, weight, RegionPartition::new(cost).c_interval())
}

/// Period-one objective: stage payoff minus cost plus discounted expected
/// period-two value.
pub fn period1_objective(params: &ModelParams, cost: &CostSpec, p: f64, s: Side, q: f64) -> f64 {
    stage_payoff(s, q, params.h()) - cost.evaluate(q - p)
        + params.beta() * expected_continuation_2(params, cost, q)
}

/// Evaluates the four candidate moves and keeps the best. Exact ties go to
/// the smallest move, then to the candidate nearer one half.
pub fn period1_solve(params: &ModelParams, cost: &CostSpec, p: f64, s: Side) -> PeriodOneSolution {
    let candidates: Vec<CandidateEvaluation> = [
        (p, Provenance::Inaction),
        (interior_minimizer_b(params, cost, p), Provenance::InteriorB),
        (interior_minimizer_c(params, cost, p), Provenance::InteriorC),
        (0.5, Provenance::Median),
    ]
    .into_iter()
    .map(|(candidate, provenance)| CandidateEvaluation {
        candidate,
        objective: period1_objective(params, cost, p, s, candidate),
        provenance,
    })
    .collect();

    let best = pick_best(p, candidates.iter().map(|c| (c.candidate, c.objective)));
    PeriodOneSolution {
        next: best.next,
        value: best.value,
        candidates,
    }
}

/// Best of a candidate list under the minimal-move-then-toward-median rule.
pub(crate) fn pick_best(from: f64, candidates: impl Iterator<Item = (f64, f64)>) -> Move {
    let mut best: Option<Move> = None;
    for (next, value) in candidates {
        let better = match best {
            None => true,
            Some(b) => {
                value > b.value
                    || (value == b.value
                        && ((next - from).abs(), (next - 0.5).abs())
                            < ((b.next - from).abs(), (b.next - 0.5).abs()))
            }
        };
        if better {
            best = Some(Move { next, value });
        }
    }
    best.expect("candidate list is never empty")
}
