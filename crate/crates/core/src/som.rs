//! A single rectangular self-organizing map: best-matching-unit search,
//! the online learning rule, assignment/quantization error, and horizontal
//! growth by row or column insertion.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matrix::DataMatrix;
use crate::stats;

/// Lower bound on the neighbourhood radius during training.
pub const MIN_SIGMA: f64 = 0.5;

/// Position of a unit on its map's grid. Displayed as `{col}x{row}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPos {
    pub col: usize,
    pub row: usize,
}

impl GridPos {
    pub const fn new(col: usize, row: usize) -> Self {
        GridPos { col, row }
    }

    fn grid_distance_sq(self, other: GridPos) -> f64 {
        let dc = self.col as f64 - other.col as f64;
        let dr = self.row as f64 - other.row as f64;
        dc * dc + dr * dr
    }
}

impl fmt::Display for GridPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.col, self.row)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub weight: Vec<f64>,
    pub pos: GridPos,
    /// Indices (into the training matrix) of samples whose BMU is this unit.
    pub assigned: Vec<usize>,
    /// Mean distance between `weight` and the assigned samples; 0 when empty.
    pub mqe: f64,
    pub child: Option<Box<SomMap>>,
}

impl Unit {
    pub fn new(pos: GridPos, weight: Vec<f64>) -> Self {
        Unit { weight, pos, assigned: Vec::new(), mqe: 0.0, child: None }
    }

    pub fn is_leaf(&self) -> bool {
        self.child.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SomMap {
    pub rows: usize,
    pub cols: usize,
    /// Row-major: the unit at (col, row) is `units[row * cols + col]`.
    pub units: Vec<Unit>,
    /// mqe of the unit this map refines (mqe0 for the first layer).
    pub parent_mqe: f64,
    /// 1 for the first layer.
    pub depth: usize,
}

/// Where `grow_horizontal` put the new units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    /// A new column at this index, between old columns `index - 1` and `index`.
    Column(usize),
    /// A new row at this index, between old rows `index - 1` and `index`.
    Row(usize),
}

/// Learning-rate and neighbourhood schedule for one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    /// Epochs; each presents every routed sample once.
    pub lambda: usize,
    pub alpha0: f64,
    /// Initial neighbourhood radius. `None` means half the larger grid side.
    pub sigma0: Option<f64>,
}

impl SomMap {
    /// Builds a map from row-major weights.
    pub fn from_weights(rows: usize, cols: usize, weights: Vec<Vec<f64>>, parent_mqe: f64, depth: usize) -> Self {
        assert_eq!(weights.len(), rows * cols, "need one weight per unit");
        let units = weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| Unit::new(GridPos::new(i % cols, i / cols), w))
            .collect();
        SomMap { rows, cols, units, parent_mqe, depth }
    }

    /// `center` plus uniform noise in `[-0.01, 0.01]` scaled per attribute by `spread`.
    pub fn initialize<R: Rng + ?Sized>(
        rows: usize,
        cols: usize,
        center: &[f64],
        spread: &[f64],
        parent_mqe: f64,
        depth: usize,
        rng: &mut R,
    ) -> Self {
        let weights = (0..rows * cols)
            .map(|_| {
                center
                    .iter()
                    .zip(spread)
                    .map(|(c, s)| c + rng.random_range(-0.01..=0.01) * s)
                    .collect()
            })
            .collect();
        Self::from_weights(rows, cols, weights, parent_mqe, depth)
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    fn index(&self, pos: GridPos) -> usize {
        pos.row * self.cols + pos.col
    }

    pub fn unit(&self, pos: GridPos) -> &Unit {
        &self.units[self.index(pos)]
    }

    pub fn unit_mut(&mut self, pos: GridPos) -> &mut Unit {
        let i = self.index(pos);
        &mut self.units[i]
    }

    /// Nearest unit by Euclidean distance; ties go to the smallest (row, col).
    pub fn best_matching_unit(&self, x: &[f64]) -> GridPos {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, u) in self.units.iter().enumerate() {
            let d = stats::squared_distance(&u.weight, x);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        self.units[best].pos
    }

    /// One application of the learning rule toward `x` around `winner`:
    /// `w_i += alpha * h_ci * (x - w_i)` with a Gaussian `h_ci` of radius `sigma`.
    pub fn update(&mut self, x: &[f64], winner: GridPos, alpha: f64, sigma: f64) {
        let two_sigma_sq = 2.0 * sigma * sigma;
        for u in &mut self.units {
            let h = libm::exp(-winner.grid_distance_sq(u.pos) / two_sigma_sq);
            let a = alpha * h;
            if a == 0.0 {
                continue;
            }
            // (1 - a) w + a x: algebraically the rule above, exact when a == 1
            let keep = 1.0 - a;
            for (w, xv) in u.weight.iter_mut().zip(x) {
                *w = keep * *w + a * xv;
            }
        }
    }

    /// Routes each sample to its BMU and recomputes every unit's mqe.
    pub fn assign(&mut self, data: &DataMatrix, routed: &[usize]) {
        for u in &mut self.units {
            u.assigned.clear();
        }
        for &s in routed {
            let pos = self.best_matching_unit(data.row(s));
            self.unit_mut(pos).assigned.push(s);
        }
        for u in &mut self.units {
            u.mqe = stats::mean(u.assigned.iter().map(|&s| stats::distance(&u.weight, data.row(s))));
        }
    }

    /// Map MQE: mean mqe over units that hold at least one sample.
    pub fn mqe(&self) -> f64 {
        stats::mean(self.units.iter().filter(|u| !u.assigned.is_empty()).map(|u| u.mqe))
    }

    /// Inserts a row or column between the unit with the highest mqe and its
    /// most dissimilar 4-neighbour. New weights average the two flanking units.
    pub fn grow_horizontal(&mut self) -> Insertion {
        let mut e = 0;
        for (i, u) in self.units.iter().enumerate() {
            if u.mqe > self.units[e].mqe {
                e = i;
            }
        }
        let epos = self.units[e].pos;
        let (r, c) = (epos.row, epos.col);
        // same-row neighbours first so that distance ties favour a column
        let mut candidates: Vec<GridPos> = Vec::with_capacity(4);
        if c > 0 {
            candidates.push(GridPos::new(c - 1, r));
        }
        if c + 1 < self.cols {
            candidates.push(GridPos::new(c + 1, r));
        }
        if r > 0 {
            candidates.push(GridPos::new(c, r - 1));
        }
        if r + 1 < self.rows {
            candidates.push(GridPos::new(c, r + 1));
        }
        let eweight = &self.units[e].weight;
        let mut d = candidates[0];
        let mut dmax = stats::squared_distance(eweight, &self.unit(d).weight);
        for &cand in &candidates[1..] {
            let dist = stats::squared_distance(eweight, &self.unit(cand).weight);
            if dist > dmax {
                dmax = dist;
                d = cand;
            }
        }
        if d.row == r {
            let at = c.max(d.col);
            self.insert_column(at);
            Insertion::Column(at)
        } else {
            let at = r.max(d.row);
            self.insert_row(at);
            Insertion::Row(at)
        }
    }

    fn rebuild(&mut self, rows: usize, cols: usize, weights: Vec<Vec<f64>>) {
        let depth = self.depth;
        let parent_mqe = self.parent_mqe;
        *self = SomMap::from_weights(rows, cols, weights, parent_mqe, depth);
    }

    fn insert_column(&mut self, at: usize) {
        let mut weights = Vec::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for c in 0..=self.cols {
                let w = if c < at {
                    self.unit(GridPos::new(c, r)).weight.clone()
                } else if c == at {
                    midpoint(&self.unit(GridPos::new(at - 1, r)).weight, &self.unit(GridPos::new(at, r)).weight)
                } else {
                    self.unit(GridPos::new(c - 1, r)).weight.clone()
                };
                weights.push(w);
            }
        }
        self.rebuild(self.rows, self.cols + 1, weights);
    }

    fn insert_row(&mut self, at: usize) {
        let mut weights = Vec::with_capacity((self.rows + 1) * self.cols);
        for r in 0..=self.rows {
            for c in 0..self.cols {
                let w = if r < at {
                    self.unit(GridPos::new(c, r)).weight.clone()
                } else if r == at {
                    midpoint(&self.unit(GridPos::new(c, at - 1)).weight, &self.unit(GridPos::new(c, at)).weight)
                } else {
                    self.unit(GridPos::new(c, r - 1)).weight.clone()
                };
                weights.push(w);
            }
        }
        self.rebuild(self.rows + 1, self.cols, weights);
    }
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (x + y) / 2.0).collect()
}

/// Trains `map` on the routed samples for `schedule.lambda` epochs, each in a
/// freshly shuffled order, then reassigns samples and recomputes mqe.
///
/// With `T = lambda * routed.len()` steps, step `t` uses
/// `alpha(t) = alpha0 * (1 - t/T)` and `sigma(t) = max(sigma0 * (1 - t/T), 0.5)`.
pub fn train_map<R: Rng + ?Sized>(
    map: &mut SomMap,
    data: &DataMatrix,
    routed: &[usize],
    schedule: &Schedule,
    rng: &mut R,
) {
    let sigma0 = schedule.sigma0.unwrap_or(map.rows.max(map.cols) as f64 / 2.0);
    let total = (schedule.lambda * routed.len()) as f64;
    let mut order = routed.to_vec();
    let mut t = 0usize;
    for _ in 0..schedule.lambda {
        order.shuffle(rng);
        for &s in &order {
            let decay = 1.0 - t as f64 / total;
            let alpha = schedule.alpha0 * decay;
            let sigma = (sigma0 * decay).max(MIN_SIGMA);
            let x = data.row(s);
            let winner = map.best_matching_unit(x);
            map.update(x, winner, alpha, sigma);
            t += 1;
        }
    }
    map.assign(data, routed);
}

/// Convenience for tests and small callers: a `rows × cols` map with every
/// weight set to `w`.
pub fn uniform_map(rows: usize, cols: usize, w: &[f64]) -> SomMap {
    SomMap::from_weights(rows, cols, vec![w.to_vec(); rows * cols], 0.0, 1)
}
