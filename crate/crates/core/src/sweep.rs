//! Grid search over the breadth (`tau1`) and depth (`tau2`) thresholds.
//!
//! Every cell trains with the same seed, so cells differ only in their
//! thresholds and results do not depend on the order cells run in.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ghsom::{run_ghsom, GhsomParams};
use crate::matrix::DataMatrix;
use crate::metrics;
use crate::partition::LeafPartition;

#[derive(Debug, Clone, PartialEq)]
pub struct CellScores {
    pub ch: f64,
    /// Present when reference labels were supplied.
    pub ari: Option<f64>,
    pub leaf_count: usize,
    pub depth: usize,
    pub unit_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub tau1: f64,
    pub tau2: f64,
    pub outcome: core::result::Result<CellScores, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// Descending.
    pub tau1_values: Vec<f64>,
    /// Descending.
    pub tau2_values: Vec<f64>,
    /// Row-major over `tau1_values` × `tau2_values`.
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.tau2_values.len() + j]
    }

    fn best_by(&self, key: impl Fn(&CellScores) -> Option<f64>) -> Option<&SweepCell> {
        let mut best: Option<(&SweepCell, f64)> = None;
        for cell in &self.cells {
            if let Ok(s) = &cell.outcome {
                if let Some(v) = key(s) {
                    if best.is_none_or(|(_, b)| v > b) {
                        best = Some((cell, v));
                    }
                }
            }
        }
        best.map(|(c, _)| c)
    }

    /// Highest CH; ties keep the earliest cell (largest thresholds).
    pub fn best_ch(&self) -> Option<&SweepCell> {
        self.best_by(|s| if s.ch.is_nan() { None } else { Some(s.ch) })
    }

    pub fn best_ari(&self) -> Option<&SweepCell> {
        self.best_by(|s| s.ari)
    }

    pub fn succeeded(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_ok()).count()
    }
}

fn descending(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    v
}

/// Trains and scores one cell.
pub fn evaluate_cell<S: AsRef<str>>(data: &DataMatrix, params: &GhsomParams, labels: Option<&[S]>) -> Result<CellScores> {
    let tree = run_ghsom(data, params)?;
    let partition = LeafPartition::from_tree(&tree);
    let ch = metrics::ch_index(&partition, data)?;
    let ari = labels.map(|l| metrics::ari(&partition, l)).transpose()?;
    Ok(CellScores {
        ch,
        ari,
        leaf_count: partition.n_clusters(),
        depth: tree.max_depth(),
        unit_count: tree.unit_count(),
    })
}

/// Runs every `(tau1, tau2)` pair. Per-cell failures are recorded in the
/// cell; only empty value lists are an error.
pub fn sweep<S: AsRef<str> + Sync>(
    data: &DataMatrix,
    base: &GhsomParams,
    tau1_values: &[f64],
    tau2_values: &[f64],
    labels: Option<&[S]>,
) -> Result<SweepGrid> {
    if tau1_values.is_empty() || tau2_values.is_empty() {
        return Err(Error::InvalidParameter { name: "tau lists", reason: "must be non-empty".into() });
    }
    if let Some(l) = labels {
        if l.len() != data.n_samples() {
            return Err(Error::LengthMismatch { what: "labels", expected: data.n_samples(), found: l.len() });
        }
    }
    let tau1_values = descending(tau1_values);
    let tau2_values = descending(tau2_values);
    let pairs: Vec<(f64, f64)> =
        tau1_values.iter().flat_map(|&t1| tau2_values.iter().map(move |&t2| (t1, t2))).collect();
    let run = |&(tau1, tau2): &(f64, f64)| SweepCell {
        tau1,
        tau2,
        outcome: evaluate_cell(data, &GhsomParams { tau1, tau2, ..base.clone() }, labels),
    };
    #[cfg(feature = "parallel")]
    let cells = {
        use rayon::prelude::*;
        pairs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cells = pairs.iter().map(run).collect();
    Ok(SweepGrid { tau1_values, tau2_values, cells })
}
