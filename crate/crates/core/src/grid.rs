//! Uniform state grid over `[0, 1]`.
//!
//! Points are rounded to multiples of `2^-52`, so `1 - p` is computed
//! exactly for every grid point and the grid is closed under the mirror map
//! `p -> 1 - p`. The midpoint is exactly `0.5`.

use crate::error::{ModelError, Result};

const LATTICE: u128 = 1 << 52;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(ModelError::InvalidGridSize(n));
        }
        let intervals = (n - 1) as u128;
        let mid = (n - 1) / 2;
        let scale = LATTICE as f64;
        let lower: Vec<u128> = (0..=mid)
            .map(|i| (i as u128 * LATTICE + intervals / 2) / intervals)
            .collect();
        let mut points = Vec::with_capacity(n);
        points.extend(lower.iter().map(|&q| q as f64 / scale));
        points.extend((mid + 1..n).map(|i| (LATTICE - lower[n - 1 - i]) as f64 / scale));
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    /// Nominal spacing `1 / (n - 1)`.
    pub fn step(&self) -> f64 {
        1.0 / (self.len() - 1) as f64
    }

    /// Index of the point `0.5`.
    pub fn mid(&self) -> usize {
        (self.len() - 1) / 2
    }

    pub fn mirror(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    /// Index of the point closest to `p`; ties go to the lower index.
    pub fn nearest_index(&self, p: f64) -> usize {
        let last = self.len() - 1;
        let guess = ((p.clamp(0.0, 1.0) * last as f64).floor() as usize).min(last);
        let mut best = guess.saturating_sub(1);
        let mut best_dist = (self.points[best] - p).abs();
        for i in best + 1..=(guess + 1).min(last) {
            let d = (self.points[i] - p).abs();
            if d < best_dist {
                best = i;
                best_dist = d;
            }
        }
        best
    }

    /// Index of `p` when it is exactly a grid point.
    pub fn index_of(&self, p: f64) -> Result<usize> {
        let i = self.nearest_index(p);
        if self.points[i] == p {
            Ok(i)
        } else {
            Err(ModelError::OffGrid(p))
        }
    }
}
