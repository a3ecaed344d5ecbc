//! One-dimensional search helpers shared by the solvers.

use crate::grid::Grid;
use crate::model::CostSpec;

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `width`.
pub fn golden_section_minimize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, width: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    if b - a <= width {
        return 0.5 * (a + b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > width {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        // the bracket stops shrinking once it is a few ulps wide
        if x1 >= x2 {
            break;
        }
    }
    let mid = 0.5 * (a + b);
    [a, mid, b]
        .into_iter()
        .min_by(|x, y| f(*x).total_cmp(&f(*y)))
        .unwrap_or(mid)
}

/// `table[d] = c(points[d])`: the cost of moving `d` grid steps.
pub fn cost_table(cost: &CostSpec, grid: &Grid) -> Vec<f64> {
    grid.points().iter().map(|&x| cost.evaluate(x)).collect()
}

/// Maximizes `gain[j] - cost[|j - from|]` over grid indices.
///
/// Among exact ties the smallest move wins, then the choice nearer to the
/// midpoint `mid`, then the lower index. Scanning proceeds outward from
/// `from` and stops once `gain_max - cost[d]` falls below the incumbent,
/// which cannot change the result because `cost` is nondecreasing.
pub fn best_move(gain: &[f64], gain_max: f64, cost: &[f64], from: usize, mid: usize) -> (usize, f64) {
    let n = gain.len();
    let mut best_j = from;
    let mut best = gain[from] - cost[0];
    for d in 1..n {
        if gain_max - cost[d] < best {
            break;
        }
        let lower = from.checked_sub(d);
        let upper = (from + d < n).then_some(from + d);
        let ordered = match (lower, upper) {
            (Some(l), Some(u)) => {
                if u.abs_diff(mid) < l.abs_diff(mid) {
                    [Some(u), Some(l)]
                } else {
                    [Some(l), Some(u)]
                }
            }
            (None, None) => break,
            (l, u) => [l, u],
        };
        for j in ordered.into_iter().flatten() {
            let v = gain[j] - cost[d];
            if v > best {
                best = v;
                best_j = j;
            }
        }
    }
    (best_j, best)
}

/// Largest entry of a nonempty slice.
pub fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_interior_and_boundary_minima() {
        let x = golden_section_minimize(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        let x = golden_section_minimize(|x| (x + 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!(x < 1e-9);
        let x = golden_section_minimize(|x| (x - 2.0).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 1.0).abs() < 1e-9);
    }

    fn brute(gain: &[f64], cost: &[f64], from: usize, mid: usize) -> (usize, f64) {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..gain.len() {
            let v = gain[j] - cost[j.abs_diff(from)];
            let key = (j.abs_diff(from), j.abs_diff(mid), j);
            best = match best {
                None => Some((j, v)),
                Some((bj, bv)) => {
                    let bkey = (bj.abs_diff(from), bj.abs_diff(mid), bj);
                    if v > bv || (v == bv && key < bkey) {
                        Some((j, v))
                    } else {
                        Some((bj, bv))
                    }
                }
            };
        }
        best.unwrap()
    }

    #[test]
    fn pruned_scan_matches_full_scan() {
        let n = 41;
        let mid = 20;
        let cost: Vec<f64> = (0..n).map(|d| 0.02 * (d * d) as f64).collect();
        // deterministic pseudo-random gains with deliberate ties
        let mut state = 12345u64;
        for _ in 0..200 {
            let gain: Vec<f64> = (0..n)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 60) as f64) * 0.25
                })
                .collect();
            let gmax = max_of(&gain);
            for from in 0..n {
                assert_eq!(best_move(&gain, gmax, &cost, from, mid), brute(&gain, &cost, from, mid));
            }
        }
    }

    #[test]
    fn zero_cost_ties_prefer_staying_then_midpoint() {
        let gain = vec![1.0; 9];
        let cost = vec![0.0; 9];
        assert_eq!(best_move(&gain, 1.0, &cost, 2, 4), (2, 1.0));
        let gain = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        // already at a maximizer
        assert_eq!(best_move(&gain, 1.0, &cost, 4, 4), (4, 1.0));
        // from 1, the nearest maximizer is 3
        assert_eq!(best_move(&gain, 1.0, &cost, 1, 4), (3, 1.0));
    }
}
