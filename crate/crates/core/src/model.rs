//! Model primitives shared by every solver: parameters, persuasion costs,
//! the majority rule, stage payoffs and polarization indices.

use std::fmt;

use crate::error::{ModelError, Result};

/// A binary world state `s` or implemented policy `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Zero,
    One,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Zero, Side::One];

    pub fn index(self) -> usize {
        match self {
            Side::Zero => 0,
            Side::One => 1,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Zero => Side::One,
            Side::One => Side::Zero,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Economic primitives: probability of state 1, discount factor and the
/// per-period payoff from implementing the preferred policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pi: f64,
    beta: f64,
    h: f64,
}

impl ModelParams {
    pub fn new(pi: f64, beta: f64, h: f64) -> Result<Self> {
        if !(pi > 0.0 && pi < 1.0) {
            return Err(ModelError::OutOfRange {
                name: "pi",
                value: pi,
                expected: "(0, 1)",
            });
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ModelError::OutOfRange {
                name: "beta",
                value: beta,
                expected: "(0, 1)",
            });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(ModelError::OutOfRange {
                name: "H",
                value: h,
                expected: "(0, inf)",
            });
        }
        Ok(Self { pi, beta, h })
    }

    pub fn pi(&self) -> f64 {
        self.pi
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Probability of drawing state `s`.
    pub fn prob(&self, s: Side) -> f64 {
        match s {
            Side::One => self.pi,
            Side::Zero => 1.0 - self.pi,
        }
    }

    /// Largest discounted payoff any elite can collect, `H / (1 - beta)`.
    pub fn value_bound(&self) -> f64 {
        self.h / (1.0 - self.beta)
    }
}

/// Number of equally spaced displacements a tabulated cost is sampled on.
pub const TABULATED_POINTS: usize = 2001;

/// A symmetric persuasion cost sampled on `TABULATED_POINTS` displacements
/// spanning `[0, 1]` and linearly interpolated in between.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCost {
    values: Vec<f64>,
}

impl TabulatedCost {
    /// Validates zero-at-zero, strict increase and strictly increasing
    /// increments on the sample grid.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() != TABULATED_POINTS {
            return Err(ModelError::InvalidCostTable(format!(
                "expected {TABULATED_POINTS} samples, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::InvalidCostTable(format!(
                "sample {i} is not finite"
            )));
        }
        if values[0] != 0.0 {
            return Err(ModelError::InvalidCostTable(format!(
                "c(0) must be 0, got {}",
                values[0]
            )));
        }
        let mut prev_inc = 0.0;
        for i in 1..values.len() {
            let inc = values[i] - values[i - 1];
            if inc <= 0.0 {
                return Err(ModelError::InvalidCostTable(format!(
                    "not strictly increasing at sample {i}"
                )));
            }
            if i > 1 && inc <= prev_inc {
                return Err(ModelError::InvalidCostTable(format!(
                    "not strictly convex at sample {i}"
                )));
            }
            prev_inc = inc;
        }
        Ok(Self { values })
    }

    /// Samples `f` on the displacement grid and validates the result.
    pub fn from_fn(f: impl Fn(f64) -> f64) -> Result<Self> {
        let last = (TABULATED_POINTS - 1) as f64;
        Self::from_values((0..TABULATED_POINTS).map(|i| f(i as f64 / last)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let last = TABULATED_POINTS - 1;
        let pos = x.abs().min(1.0) * last as f64;
        let i = (pos.floor() as usize).min(last - 1);
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

/// The persuasion cost function `c(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CostFunction {
    /// `k x^2`.
    Quadratic { k: f64 },
    Custom(TabulatedCost),
}

impl CostFunction {
    pub fn quadratic(k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(ModelError::OutOfRange {
                name: "k",
                value: k,
                expected: "[0, inf)",
            });
        }
        Ok(CostFunction::Quadratic { k })
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match self {
            CostFunction::Quadratic { k } => k * x * x,
            CostFunction::Custom(table) => table.evaluate(x),
        }
    }
}

impl fmt::Display for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostFunction::Quadratic { k } => write!(f, "quadratic(k={k})"),
            CostFunction::Custom(_) => write!(f, "custom"),
        }
    }
}

/// A cost function together with its cached threshold `delta = c^-1(H)`.
///
/// `delta` is `f64::INFINITY` when `c(1) < H`: no reachable move ever costs
/// as much as one period of the preferred policy.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    function: CostFunction,
    delta: f64,
}

impl CostSpec {
    pub fn new(function: CostFunction, h: f64) -> Result<Self> {
        let delta = delta_threshold(&function, h)?;
        Ok(Self { function, delta })
    }

    pub fn quadratic(k: f64, h: f64) -> Result<Self> {
        Self::new(CostFunction::quadratic(k)?, h)
    }

    pub fn function(&self) -> &CostFunction {
        &self.function
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.function.evaluate(x)
    }
}

pub fn evaluate_cost(cost: &CostSpec, x: f64) -> f64 {
    cost.evaluate(x)
}

/// Solves `c(delta) = h` for `delta >= 0`.
pub fn delta_threshold(cost: &CostFunction, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(ModelError::OutOfRange {
            name: "H",
            value: h,
            expected: "(0, inf)",
        });
    }
    if cost.evaluate(1.0) < h {
        return Ok(f64::INFINITY);
    }
    match cost {
        CostFunction::Quadratic { k } => Ok((h / k).sqrt()),
        CostFunction::Custom(table) => {
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if table.evaluate(mid) < h {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// Majority rule: policy 1 above one half, policy 0 below, and the mover's
/// preference exactly at one half.
pub fn implemented_policy(p: f64, mover_preferred: Side) -> Side {
    if p > 0.5 {
        Side::One
    } else if p < 0.5 {
        Side::Zero
    } else {
        mover_preferred
    }
}

/// `H` when the policy implemented at `p_next` matches `s`; the mover always
/// gets its way at the knife-edge.
pub fn stage_payoff(s: Side, p_next: f64, h: f64) -> f64 {
    if implemented_policy(p_next, s) == s {
        h
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationReport {
    /// `1/2 - |p - 1/2|`
    pub distance_index: f64,
    /// `p (1 - p)`
    pub variance_index: f64,
}

pub fn polarization_indices(p: f64) -> PolarizationReport {
    PolarizationReport {
        distance_index: 0.5 - (p - 0.5).abs(),
        variance_index: p * (1.0 - p),
    }
}

/// True iff `c_tilde` has strictly larger increments than `c` on every
/// adjacent pair of `samples`. Adjacent pairs suffice: increments telescope.
pub fn cost_dominates(c_tilde: &CostFunction, c: &CostFunction, samples: &[f64]) -> Result<bool> {
    let valid = samples.len() >= 2
        && samples.iter().all(|x| (0.0..=1.0).contains(x))
        && samples.windows(2).all(|w| w[0] < w[1]);
    if !valid {
        return Err(ModelError::InvalidSamples);
    }
    Ok(samples.windows(2).all(|w| {
        let inc_tilde = c_tilde.evaluate(w[1]) - c_tilde.evaluate(w[0]);
        let inc = c.evaluate(w[1]) - c.evaluate(w[0]);
        inc_tilde > inc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quad(k: f64) -> CostSpec {
        CostSpec::quadratic(k, 1.0).unwrap()
    }

    fn steps(step: f64) -> Vec<f64> {
        let n = (1.0 / step).round() as usize;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    #[test]
    fn params_reject_out_of_range() {
        assert!(ModelParams::new(0.5, 0.9, 1.0).is_ok());
        assert!(ModelParams::new(0.0, 0.9, 1.0).is_err());
        assert!(ModelParams::new(0.5, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.5, 1.2, 1.0).is_err());
        assert!(ModelParams::new(0.5, 0.9, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 0.9, 1.0).is_err());
    }

    #[test]
    fn quadratic_cost_values() {
        let c = quad(10.0);
        assert_eq!(evaluate_cost(&c, 0.0), 0.0);
        assert!((evaluate_cost(&c, 0.1) - 0.1).abs() < 1e-15);
        assert!((evaluate_cost(&c, -0.1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        let d = delta_threshold(&CostFunction::Quadratic { k: 10.0 }, 1.0).unwrap();
        assert!((d - 0.316_227_766).abs() < 1e-7);
        let d = delta_threshold(&CostFunction::Quadratic { k: 4.0 }, 1.0).unwrap();
        assert_eq!(d, 0.5);
        let d = delta_threshold(&CostFunction::Quadratic { k: 0.5 }, 1.0).unwrap();
        assert!(d.is_infinite());
        assert!(delta_threshold(&CostFunction::Quadratic { k: 1.0 }, 0.0).is_err());
        assert!(delta_threshold(&CostFunction::Quadratic { k: 1.0 }, -1.0).is_err());
    }

    #[test]
    fn custom_delta_inverts_cost() {
        let table = TabulatedCost::from_fn(|x| 3.0 * x.powi(4) + x * x).unwrap();
        let cost = CostFunction::Custom(table);
        for h in [0.01, 0.5, 1.0, 3.9] {
            let d = delta_threshold(&cost, h).unwrap();
            assert!(d.is_finite());
            assert!((cost.evaluate(d) - h).abs() <= 1e-10, "h={h}");
        }
        assert!(delta_threshold(&cost, 4.5).unwrap().is_infinite());
    }

    #[test]
    fn tabulated_cost_validation() {
        assert!(TabulatedCost::from_fn(|x| x).is_err()); // linear: not strictly convex
        assert!(TabulatedCost::from_fn(|x| x * x + 1.0).is_err());
        assert!(TabulatedCost::from_fn(|x| -x * x).is_err());
        assert!(TabulatedCost::from_values(vec![0.0, 1.0]).is_err());
        let t = TabulatedCost::from_fn(|x| 2.0 * x * x).unwrap();
        assert!((t.evaluate(0.5) - 0.5).abs() < 1e-12);
        assert_eq!(t.evaluate(-0.25), t.evaluate(0.25));
        assert_eq!(t.evaluate(1.0), 2.0);
    }

    #[test]
    fn majority_rule() {
        assert_eq!(implemented_policy(0.6, Side::Zero), Side::One);
        assert_eq!(implemented_policy(0.5, Side::Zero), Side::Zero);
        assert_eq!(implemented_policy(0.5, Side::One), Side::One);
        assert_eq!(implemented_policy(0.3, Side::One), Side::Zero);
    }

    #[test]
    fn stage_payoff_examples() {
        assert_eq!(stage_payoff(Side::One, 0.7, 1.0), 1.0);
        assert_eq!(stage_payoff(Side::One, 0.5, 1.0), 1.0);
        assert_eq!(stage_payoff(Side::One, 0.2, 1.0), 0.0);
        for s in Side::BOTH {
            assert_eq!(stage_payoff(s, 0.5, 2.5), 2.5);
        }
    }

    #[test]
    fn polarization_examples() {
        let r = polarization_indices(0.5);
        assert_eq!((r.distance_index, r.variance_index), (0.5, 0.25));
        let r = polarization_indices(1.0);
        assert_eq!((r.distance_index, r.variance_index), (0.0, 0.0));
        let r = polarization_indices(0.25);
        assert_eq!((r.distance_index, r.variance_index), (0.25, 0.1875));
    }

    #[test]
    fn dominance_examples() {
        let s = steps(0.05);
        let k = |k| CostFunction::Quadratic { k };
        assert!(cost_dominates(&k(20.0), &k(10.0), &s).unwrap());
        assert!(!cost_dominates(&k(10.0), &k(10.0), &s).unwrap());
        assert!(!cost_dominates(&k(5.0), &k(10.0), &s).unwrap());
        assert!(cost_dominates(&k(20.0), &k(10.0), &[0.5, 0.2]).is_err());
        assert!(cost_dominates(&k(20.0), &k(10.0), &[0.5]).is_err());
    }

    #[test]
    fn convexity_on_midpoint_triples() {
        let c = quad(10.0);
        let xs = steps(1e-3);
        for w in xs.windows(3) {
            assert!(c.evaluate(w[1]) < 0.5 * (c.evaluate(w[0]) + c.evaluate(w[2])));
        }
    }

    #[test]
    fn symmetry_on_fine_samples() {
        let c = quad(7.0);
        let t = CostSpec::new(
            CostFunction::Custom(TabulatedCost::from_fn(|x| x.powi(2) + x.powi(6)).unwrap()),
            1.0,
        )
        .unwrap();
        for x in steps(1e-3) {
            assert_eq!(c.evaluate(x), c.evaluate(-x));
            assert_eq!(t.evaluate(x), t.evaluate(-x));
        }
    }

    proptest! {
        #[test]
        fn delta_inverts_quadratic(k in 0.05f64..500.0, h in 0.01f64..5.0) {
            let spec = CostSpec::quadratic(k, h).unwrap();
            if spec.delta().is_finite() {
                prop_assert!((spec.evaluate(spec.delta()) - h).abs() <= 1e-10);
            } else {
                prop_assert!(k < h);
            }
        }

        #[test]
        fn variance_identity(p in 0.0f64..=1.0) {
            let r = polarization_indices(p);
            prop_assert!((r.variance_index - (0.25 - (p - 0.5).powi(2))).abs() <= 1e-15);
            prop_assert!(r.distance_index <= 0.5 && r.variance_index <= 0.25);
        }
    }
}
