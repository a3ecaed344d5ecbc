//! Solvers for a dynamic model of elite persuasion under majority rule.
//!
//! An elite observes a binary state of the world and may pay a convex cost
//! to shift the share `p` of the public supporting policy 1 before majority
//! rule picks the policy. This crate provides closed-form two-period
//! solutions, value iteration for the infinite-horizon single-elite problem,
//! the two-elite Stackelberg game, a grid-based Markov-perfect equilibrium
//! solver for alternating elites, and brute-force oracles for validation.

pub mod error;
pub mod grid;
pub mod model;
pub mod oracle;
pub mod search;
pub mod single_elite;
pub mod two_elite;

pub use error::{ModelError, Result};
pub use grid::Grid;
pub use model::{
    cost_dominates, delta_threshold, evaluate_cost, implemented_policy, polarization_indices, stage_payoff,
    CostFunction, CostSpec, ModelParams, PolarizationReport, Side, TabulatedCost,
};
