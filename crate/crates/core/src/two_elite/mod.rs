//! Two opposed elites alternating in power: the two-period Stackelberg game
//! and the infinite-horizon Markov-perfect equilibrium.

mod mpe;
mod stackelberg;

pub use mpe::{check_no_deviation, mpe_solve, DeviationReport, MpeSolution};
pub use stackelberg::{
    elite_b_response, phi_continuation, stackelberg_objective, stackelberg_solve, StackelbergCandidate,
    StackelbergMove, StackelbergSolution,
};

use crate::model::{implemented_policy, Side};

/// Elite A wants the policy to match the state; elite B wants the opposite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Elite {
    A,
    B,
}

impl Elite {
    pub const BOTH: [Elite; 2] = [Elite::A, Elite::B];

    pub fn preferred(self, s: Side) -> Side {
        match self {
            Elite::A => s,
            Elite::B => s.flip(),
        }
    }

    pub fn rival(self) -> Elite {
        match self {
            Elite::A => Elite::B,
            Elite::B => Elite::A,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Elite::A => 0,
            Elite::B => 1,
        }
    }
}

/// Payoff to `elite` in state `s` when `mover` sets the share to `p_next`;
/// at exactly one half the mover picks its own preferred policy.
pub fn elite_payoff(elite: Elite, mover: Elite, s: Side, p_next: f64, h: f64) -> f64 {
    if implemented_policy(p_next, mover.preferred(s)) == elite.preferred(s) {
        h
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payoffs_follow_majority_and_mover() {
        assert_eq!(elite_payoff(Elite::A, Elite::A, Side::One, 0.7, 1.0), 1.0);
        assert_eq!(elite_payoff(Elite::B, Elite::A, Side::One, 0.7, 1.0), 0.0);
        assert_eq!(elite_payoff(Elite::A, Elite::B, Side::One, 0.5, 1.0), 0.0);
        assert_eq!(elite_payoff(Elite::B, Elite::B, Side::One, 0.5, 1.0), 1.0);
        assert_eq!(elite_payoff(Elite::A, Elite::A, Side::Zero, 0.5, 1.0), 1.0);
        assert_eq!(elite_payoff(Elite::B, Elite::A, Side::Zero, 0.2, 2.0), 0.0);
    }
}
