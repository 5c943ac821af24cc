//! Grid sweep over the adversarial worst-case construction.
//!
//! Each cell builds the piecewise-linear instance for one (rounds, momentum,
//! stepsize-decay) triple, replays the optimizer on it, and records the
//! realized final gap next to the predicted floor. A cell passes when the
//! gap is at least the floor.

use std::fmt::Write as _;

use rayon::prelude::*;

use ftrlm_core::lower_bound::{verify_lower_bound, AdversarialInstance, LowerBoundReport};

use crate::Result;

/// One (rounds, momentum, decay-exponent) combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub rounds: usize,
    pub beta: f64,
    pub alpha_exp: f64,
}

/// The default 27-cell grid: horizons 1e2/1e3/1e4 crossed with momentum
/// 0/0.5/0.9 and decay exponents 0/0.25/0.5.
pub fn default_grid() -> Vec<SweepCell> {
    let mut cells = Vec::with_capacity(27);
    for &rounds in &[100usize, 1_000, 10_000] {
        for &beta in &[0.0, 0.5, 0.9] {
            for &alpha_exp in &[0.0, 0.25, 0.5] {
                cells.push(SweepCell {
                    rounds,
                    beta,
                    alpha_exp,
                });
            }
        }
    }
    cells
}

/// Outcome of one cell.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub cell: SweepCell,
    pub c: f64,
    pub l: f64,
    pub report: LowerBoundReport,
}

impl SweepRow {
    pub fn ratio(&self) -> f64 {
        self.report.ratio()
    }

    pub fn passed(&self) -> bool {
        self.ratio() >= 1.0
    }
}

/// Run every cell (in parallel) with stepsize constant `c` and Lipschitz
/// budget `l`; row order matches cell order.
pub fn run_sweep(cells: &[SweepCell], c: f64, l: f64) -> Result<Vec<SweepRow>> {
    cells
        .par_iter()
        .map(|&cell| {
            let inst = AdversarialInstance::new(cell.rounds, cell.alpha_exp, cell.beta, c, l)?;
            let report = verify_lower_bound(&inst)?;
            Ok(SweepRow { cell, c, l, report })
        })
        .collect()
}

pub fn all_passed(rows: &[SweepRow]) -> bool {
    rows.iter().all(SweepRow::passed)
}

/// Render rows as CSV, one line per cell.
pub fn render_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("T,beta,alpha,c,L,observed_gap,theoretical_floor,ratio\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:e},{:e},{:e}",
            row.cell.rounds,
            row.cell.beta,
            row.cell.alpha_exp,
            row.c,
            row.l,
            row.report.observed_gap,
            row.report.theoretical_floor,
            row.ratio(),
        )
        .expect("writing to a String cannot fail");
    }
    out
}
