use polarsolve_core::single_elite::{solve_infinite, verify_polarization_pull, BellmanOperator, ValueTable};
use polarsolve_core::two_elite::{check_no_deviation, elite_b_response, mpe_solve, Elite};
use polarsolve_core::{CostSpec, Grid, ModelParams, Side};
use proptest::prelude::*;

const N: usize = 41;

fn table() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-5.0..5.0f64, N), prop::collection::vec(-5.0..5.0f64, N))
}

/// Values rising to the midpoint and falling after it.
fn peaked() -> impl Strategy<Value = Vec<f64>> {
    (0.0..3.0f64, prop::collection::vec(0.0..0.5f64, N - 1)).prop_map(|(top, steps)| {
        let mid = (N - 1) / 2;
        let mut v = vec![top; N];
        for i in (0..mid).rev() {
            v[i] = v[i + 1] - steps[i];
        }
        for i in mid + 1..N {
            v[i] = v[i - 1] - steps[i - 1];
        }
        v
    })
}

fn operator(pi: f64, beta: f64, k: f64) -> BellmanOperator {
    let params = ModelParams::new(pi, beta, 1.0).unwrap();
    let cost = CostSpec::quadratic(k, 1.0).unwrap();
    BellmanOperator::new(&params, &cost, &Grid::new(N).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bellman_is_a_contraction(v in table(), w in table(), beta in 0.1..0.99f64, k in 0.0..50.0f64) {
        let op = operator(0.4, beta, k);
        let grid = op.grid().clone();
        let v = ValueTable::new(&grid, v.0, v.1).unwrap();
        let w = ValueTable::new(&grid, w.0, w.1).unwrap();
        let lhs = op.apply(&v).sup_distance(&op.apply(&w));
        prop_assert!(lhs <= beta * v.sup_distance(&w) + 1e-12);
    }

    #[test]
    fn constants_pass_through_discounted(v in table(), a in -3.0..3.0f64) {
        let op = operator(0.6, 0.9, 10.0);
        let grid = op.grid().clone();
        let v = ValueTable::new(&grid, v.0, v.1).unwrap();
        let shifted = op.apply(&v.map(|x| x + a));
        prop_assert!(shifted.sup_distance(&op.apply(&v).map(|x| x + 0.9 * a)) <= 1e-12);
    }

    #[test]
    fn peaks_survive_one_sweep(v0 in peaked(), v1 in peaked(), k in 0.5..200.0f64) {
        let op = operator(0.5, 0.9, k);
        let grid = op.grid().clone();
        let tv = op.apply(&ValueTable::new(&grid, v0, v1).unwrap());
        let mid = grid.mid();
        for s in Side::BOTH {
            let x = tv.values(s);
            for i in 0..N - 1 {
                if i < mid {
                    prop_assert!(x[i + 1] >= x[i] - 1e-12);
                } else {
                    prop_assert!(x[i + 1] <= x[i] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn elite_b_never_overshoots(p in 0.0..=1.0f64, k in 0.0..500.0f64, one in any::<bool>()) {
        let params = ModelParams::new(0.5, 0.9, 1.0).unwrap();
        let cost = CostSpec::quadratic(k, 1.0).unwrap();
        let s = if one { Side::One } else { Side::Zero };
        let r = elite_b_response(&params, &cost, p, s);
        prop_assert!(r == p || r == 0.5);
    }
}

#[test]
fn converged_single_elite_tables_satisfy_proposition_one() {
    let grid = Grid::new(301).unwrap();
    for (pi, k) in [(0.5, 0.5), (0.7, 10.0), (0.9, 200.0)] {
        let params = ModelParams::new(pi, 0.9, 1.0).unwrap();
        let cost = CostSpec::quadratic(k, 1.0).unwrap();
        let sol = solve_infinite(&params, &cost, &grid, 1e-10, 10_000).unwrap();
        assert!(sol.converged);
        let violations = verify_polarization_pull(&sol.values, &sol.policy);
        assert!(violations.is_empty(), "pi={pi} k={k}: {violations:?}");
    }
}

#[test]
fn mpe_values_respect_payoff_bounds() {
    let grid = Grid::new(101).unwrap();
    for (pi, beta, k) in [(0.5, 0.9, 10.0), (0.3, 0.5, 0.5), (0.9, 0.9, 200.0)] {
        let params = ModelParams::new(pi, beta, 1.0).unwrap();
        let cost = CostSpec::quadratic(k, 1.0).unwrap();
        let sol = mpe_solve(&params, &cost, &grid, 600, 1e-9).unwrap();
        let bound = 1.0 / (1.0 - beta);
        for e in Elite::BOTH {
            let all = Side::BOTH
                .iter()
                .flat_map(|&s| sol.mover_values(e, s).iter())
                .chain(sol.waiting_values(e));
            for &x in all {
                assert!((0.0..=bound).contains(&x), "pi={pi} beta={beta} k={k}: {x}");
            }
        }
    }
}

/// Near even odds the backward recursion alternates between the game where A
/// moves first and the one where B does. Tables from a single ordering
/// (A's at step T, B's at step T-1) form an exact stationary equilibrium.
#[test]
fn each_first_mover_ordering_is_stationary_at_even_odds() {
    let grid = Grid::new(201).unwrap();
    let params = ModelParams::new(0.5, 0.9, 1.0).unwrap();
    let cost = CostSpec::quadratic(10.0, 1.0).unwrap();
    let last = mpe_solve(&params, &cost, &grid, 400, 1e-9).unwrap();
    let previous = mpe_solve(&params, &cost, &grid, 399, 1e-9).unwrap();
    assert!(!last.converged);
    assert_eq!(last.parity_residual, 0.0);

    let mixed = check_no_deviation(&params, &cost, &last);
    assert!(mixed.max_gain > 1e-4, "{mixed:?}");

    let mut chain = last.clone();
    let (a, b) = (Elite::A.index(), Elite::B.index());
    chain.v[b] = previous.v[b].clone();
    chain.sigma[b] = previous.sigma[b].clone();
    chain.u[a] = previous.u[a].clone();
    let report = check_no_deviation(&params, &cost, &chain);
    assert!(report.max_gain <= 1e-12 && report.consistency_gap <= 1e-12, "{report:?}");
}
