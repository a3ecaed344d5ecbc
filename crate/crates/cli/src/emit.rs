//! CSV tables: one header row, one row per grid point, ascending in `p`.

use std::path::Path;

use polarsolve_core::single_elite::{PolicyTable, ValueTable};
use polarsolve_core::two_elite::{Elite, MpeSolution};
use polarsolve_core::Side;

use crate::RunError;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Fixed twelve decimals; shares and utilities are O(1), so this keeps the
/// round-trip error below 1e-12.
pub fn format_number(x: f64) -> String {
    let s = format!("{x:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_number(x)))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory write")
    }

    pub fn write(&self, path: &Path) -> Result<(), RunError> {
        std::fs::write(path, self.to_bytes()).map_err(|e| RunError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, RunError> {
        let bad = |msg: String| RunError::Parse {
            path: path.to_path_buf(),
            message: msg,
        };
        let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
        let header = r
            .headers()
            .map_err(|e| bad(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let row = record
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| bad(format!("`{f}` is not a number"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }
}

pub fn single_policy_table(policy: &PolicyTable) -> Table {
    let grid = policy.grid();
    let mut t = Table::new(&["p", "sigma_s0", "sigma_s1"]);
    for i in 0..grid.len() {
        t.push(vec![grid.point(i), policy.share(Side::Zero, i), policy.share(Side::One, i)]);
    }
    t
}

pub fn single_value_table(values: &ValueTable) -> Table {
    let grid = values.grid();
    let mut t = Table::new(&["p", "v_s0", "v_s1"]);
    for i in 0..grid.len() {
        t.push(vec![grid.point(i), values.get(Side::Zero, i), values.get(Side::One, i)]);
    }
    t
}

pub fn mpe_policy_table(sol: &MpeSolution) -> Table {
    let mut t = Table::new(&["p", "sigmaA_s0", "sigmaA_s1", "sigmaB_s0", "sigmaB_s1"]);
    let g = &sol.grid;
    for i in 0..g.len() {
        let mut row = vec![g.point(i)];
        for e in Elite::BOTH {
            for s in Side::BOTH {
                row.push(g.point(sol.policy(e, s)[i]));
            }
        }
        t.push(row);
    }
    t
}

pub fn mpe_value_table(sol: &MpeSolution) -> Table {
    let mut t = Table::new(&["p", "vA_s0", "vA_s1", "uA", "vB_s0", "vB_s1", "uB"]);
    let g = &sol.grid;
    for i in 0..g.len() {
        let mut row = vec![g.point(i)];
        for e in Elite::BOTH {
            for s in Side::BOTH {
                row.push(sol.mover_values(e, s)[i]);
            }
            row.push(sol.waiting_values(e)[i]);
        }
        t.push(row);
    }
    t
}
