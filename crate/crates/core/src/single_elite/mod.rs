//! The single-elite problem: the two-period benchmark, the infinite-horizon
//! Bellman system and comparative statics across cost technologies.

mod comparative;
mod infinite;
mod two_period;

pub use comparative::{compare_cost_technologies, ContinuationMode, CostComparison, ShrinkViolation};
pub use infinite::{
    bellman_apply, contraction_iteration_bound, solve_infinite, verify_polarization_pull, BellmanOperator,
    InfiniteHorizonSolution, PolicyTable, ValueTable, Violation, ViolationKind, PEAK_TOLERANCE,
};
pub use two_period::{
    expected_continuation_2, interior_minimizer_b, interior_minimizer_c, period1_objective, period1_solve,
    period2_solve, CandidateEvaluation, Move, PeriodOneSolution, Provenance, Region, RegionPartition,
};
pub(crate) use two_period::pick_best;
