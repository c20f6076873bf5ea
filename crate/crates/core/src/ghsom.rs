//! Growing Hierarchical SOM: layer-0 statistics, per-map breadth growth and
//! depth expansion into child maps.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::partition::ClusterPath;
use crate::rng;
use crate::som::{self, GridPos, Schedule, SomMap, Unit};
use crate::stats;

/// A unit needs at least this many samples to be refined by a child map.
pub const MIN_EXPAND_SAMPLES: usize = 4;

/// Side length of every freshly created map.
pub const INITIAL_GRID: usize = 2;

/// What a unit's mqe is compared against (times `tau2`) when deciding
/// whether it gets a child map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpansionReference {
    /// The layer-0 error `mqe0` (the algorithmic listing's criterion).
    #[default]
    Layer0,
    /// The mqe of the unit the current map refines.
    ParentUnit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhsomParams {
    /// Breadth threshold: a map stops growing once `MQE_m < tau1 * parent_mqe`.
    pub tau1: f64,
    /// Depth threshold: units with `mqe_i >= tau2 * mqe0` get a child map.
    pub tau2: f64,
    /// Training epochs between growth checks.
    pub lambda: usize,
    pub alpha0: f64,
    /// `None` uses half the larger grid side of the map being trained.
    pub sigma0: Option<f64>,
    pub max_depth: usize,
    pub seed: u64,
    pub expansion_reference: ExpansionReference,
}

impl Default for GhsomParams {
    fn default() -> Self {
        GhsomParams {
            tau1: 0.1,
            tau2: 0.1,
            lambda: 100,
            alpha0: 0.5,
            sigma0: None,
            max_depth: 10,
            seed: 0,
            expansion_reference: ExpansionReference::Layer0,
        }
    }
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

impl GhsomParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau1 > 0.0 && self.tau1 <= 1.0) {
            return Err(invalid("tau1", format!("must be in (0, 1], got {}", self.tau1)));
        }
        if !(self.tau2 > 0.0 && self.tau2 <= 1.0) {
            return Err(invalid("tau2", format!("must be in (0, 1], got {}", self.tau2)));
        }
        if self.lambda == 0 {
            return Err(invalid("lambda", "must be at least 1".into()));
        }
        if !(self.alpha0 > 0.0 && self.alpha0 <= 1.0) {
            return Err(invalid("alpha0", format!("must be in (0, 1], got {}", self.alpha0)));
        }
        if let Some(s) = self.sigma0 {
            if !(s > 0.0 && s.is_finite()) {
                return Err(invalid("sigma0", format!("must be positive, got {s}")));
            }
        }
        if self.max_depth == 0 {
            return Err(invalid("max_depth", "must be at least 1".into()));
        }
        Ok(())
    }

    fn schedule(&self) -> Schedule {
        Schedule { lambda: self.lambda, alpha0: self.alpha0, sigma0: self.sigma0 }
    }
}

/// A trained hierarchy. Units' `assigned` lists index rows of the matrix the
/// tree was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct GhsomTree {
    pub w0: Vec<f64>,
    pub mqe0: f64,
    pub root: SomMap,
    pub params: GhsomParams,
    pub sample_ids: Vec<String>,
    pub attribute_names: Vec<String>,
}

/// One level of a path from the root map down to a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep {
    pub pos: GridPos,
    /// Grid shape of the map containing `pos`.
    pub rows: usize,
    pub cols: usize,
}

/// A unit together with the path that reaches it.
#[derive(Debug, Clone)]
pub struct NodeRef<'a> {
    pub steps: Vec<PathStep>,
    pub unit: &'a Unit,
    /// The map containing `unit`.
    pub map: &'a SomMap,
}

impl NodeRef<'_> {
    pub fn path(&self) -> ClusterPath {
        ClusterPath(self.steps.iter().map(|s| s.pos).collect())
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

/// Layer-0 weight (column means) and mean quantization error (mean distance
/// from the weight to every sample).
pub fn compute_layer0(m: &DataMatrix) -> Result<(Vec<f64>, f64)> {
    if m.is_empty() {
        return Err(Error::Empty);
    }
    let all: Vec<usize> = (0..m.n_samples()).collect();
    let w0 = centroid(m, &all);
    let mqe0 = stats::mean(m.rows().map(|x| stats::distance(&w0, x)));
    Ok((w0, mqe0))
}

fn centroid(m: &DataMatrix, rows: &[usize]) -> Vec<f64> {
    let mut c = alloc::vec![0.0; m.n_attributes()];
    for &i in rows {
        for (acc, v) in c.iter_mut().zip(m.row(i)) {
            *acc += v;
        }
    }
    let n = rows.len() as f64;
    c.iter_mut().for_each(|v| *v /= n);
    c
}

fn spread(m: &DataMatrix, rows: &[usize], center: &[f64]) -> Vec<f64> {
    let n = rows.len() as f64;
    (0..m.n_attributes())
        .map(|j| {
            let ss: f64 = rows.iter().map(|&i| stats::sq(m.get(i, j) - center[j])).sum();
            stats::sqrt(ss / n)
        })
        .collect()
}

/// Trains a GHSOM on every row of `m`.
pub fn run_ghsom(m: &DataMatrix, params: &GhsomParams) -> Result<GhsomTree> {
    params.validate()?;
    if m.n_samples() < MIN_EXPAND_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_EXPAND_SAMPLES, found: m.n_samples() });
    }
    let (w0, mqe0) = compute_layer0(m)?;
    let all: Vec<usize> = (0..m.n_samples()).collect();
    let builder = Builder { data: m, params, mqe0 };
    let root = builder.build(&all, &w0, mqe0, &[])?;
    Ok(GhsomTree {
        w0,
        mqe0,
        root,
        params: params.clone(),
        sample_ids: m.sample_ids().to_vec(),
        attribute_names: m.attribute_names().to_vec(),
    })
}

struct Builder<'a> {
    data: &'a DataMatrix,
    params: &'a GhsomParams,
    mqe0: f64,
}

impl Builder<'_> {
    /// Most units a map may reach before growth is declared non-convergent.
    fn unit_budget(routed: usize) -> usize {
        (4 * routed).max(64)
    }

    /// Train/grow cycle for one map, then recursive expansion of its units.
    fn build(&self, routed: &[usize], center: &[f64], parent_mqe: f64, path: &[GridPos]) -> Result<SomMap> {
        let mut map = self.grow(routed, center, parent_mqe, path)?;
        self.expand(&mut map, path)?;
        Ok(map)
    }

    fn grow(&self, routed: &[usize], center: &[f64], parent_mqe: f64, path: &[GridPos]) -> Result<SomMap> {
        let mut rng = rng::stream(self.params.seed, path);
        let spread = spread(self.data, routed, center);
        let depth = path.len() + 1;
        let mut map = SomMap::initialize(INITIAL_GRID, INITIAL_GRID, center, &spread, parent_mqe, depth, &mut rng);
        let schedule = self.params.schedule();
        loop {
            som::train_map(&mut map, self.data, routed, &schedule, &mut rng);
            let mqe = map.mqe();
            // a map that explains everything (mqe 0) cannot improve further
            if mqe < self.params.tau1 * parent_mqe || mqe == 0.0 {
                return Ok(map);
            }
            if map.n_units() >= Self::unit_budget(routed.len()) {
                return Err(Error::GrowthLimit {
                    path: format!("{}", ClusterPath(path.to_vec())),
                    units: map.n_units(),
                });
            }
            map.grow_horizontal();
        }
    }

    fn expand(&self, map: &mut SomMap, path: &[GridPos]) -> Result<()> {
        let reference = match self.params.expansion_reference {
            ExpansionReference::Layer0 => self.mqe0,
            ExpansionReference::ParentUnit => map.parent_mqe,
        };
        let depth = map.depth;
        let targets: Vec<usize> = map
            .units
            .iter()
            .enumerate()
            .filter(|(_, u)| should_expand(u, depth, reference, self.params))
            .map(|(i, _)| i)
            .collect();

        let children: Vec<Result<SomMap>> = {
        let units = &map.units;
        let build_child = |i: usize| -> Result<SomMap> {
            let unit = &units[i];
            let mut child_path = path.to_vec();
            child_path.push(unit.pos);
            let center = centroid(self.data, &unit.assigned);
            let child = self.build(&unit.assigned, &center, unit.mqe, &child_path)?;
            if child.mqe() > unit.mqe + 1e-9 {
                log::warn!(
                    "child map of {} has MQE {} above its parent unit's mqe {}",
                    ClusterPath(child_path),
                    child.mqe(),
                    unit.mqe
                );
            }
            Ok(child)
        };

        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            targets.par_iter().map(|&i| build_child(i)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            targets.iter().map(|&i| build_child(i)).collect()
        }
        };

        for (i, child) in targets.into_iter().zip(children) {
            map.units[i].child = Some(Box::new(child?));
        }
        Ok(())
    }
}

fn should_expand(u: &Unit, depth: usize, reference: f64, params: &GhsomParams) -> bool {
    u.mqe > 0.0
        && u.mqe >= params.tau2 * reference
        && u.assigned.len() >= MIN_EXPAND_SAMPLES
        && depth < params.max_depth
}

/// A broken growth or expansion invariant found by [`GhsomTree::audit`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `MQE_m >= tau1 * parent_mqe` on a final map.
    Breadth { path: String, mqe: f64, bound: f64 },
    /// A leaf that still meets every expansion condition.
    Depth { path: String, mqe: f64, bound: f64, assigned: usize },
    /// A sample whose unit is not its best match.
    Assignment { path: String, sample: usize },
}

impl GhsomTree {
    /// Depth-first, row-major walk over every unit.
    pub fn nodes(&self) -> Vec<NodeRef<'_>> {
        let mut out = Vec::new();
        collect(&self.root, &mut Vec::new(), &mut out);
        out
    }

    pub fn leaves(&self) -> Vec<NodeRef<'_>> {
        self.nodes().into_iter().filter(|n| n.unit.is_leaf()).collect()
    }

    /// Every map, root first, in depth-first order, with its path.
    pub fn maps(&self) -> Vec<(ClusterPath, &SomMap)> {
        let mut out = alloc::vec![(ClusterPath::default(), &self.root)];
        for n in self.nodes() {
            if let Some(c) = &n.unit.child {
                out.push((n.path(), c.as_ref()));
            }
        }
        out
    }

    pub fn unit_count(&self) -> usize {
        self.maps().iter().map(|(_, m)| m.n_units()).sum()
    }

    pub fn max_depth(&self) -> usize {
        self.maps().iter().map(|(_, m)| m.depth).max().unwrap_or(0)
    }

    /// Leaf units that hold at least one sample.
    pub fn leaf_count(&self) -> usize {
        self.leaves().iter().filter(|n| !n.unit.assigned.is_empty()).count()
    }

    /// Checks breadth, depth and assignment invariants against `data` (the
    /// matrix the tree was trained on). An empty result means the tree is sound.
    pub fn audit(&self, data: &DataMatrix) -> Vec<Violation> {
        let mut out = Vec::new();
        for (path, map) in self.maps() {
            let mqe = map.mqe();
            let bound = self.params.tau1 * map.parent_mqe;
            if !(mqe < bound || mqe == 0.0) {
                out.push(Violation::Breadth { path: format!("{path}"), mqe, bound });
            }
            for u in &map.units {
                for &s in &u.assigned {
                    if map.best_matching_unit(data.row(s)) != u.pos {
                        out.push(Violation::Assignment { path: format!("{path}"), sample: s });
                    }
                }
            }
        }
        for leaf in self.leaves() {
            let reference = match self.params.expansion_reference {
                ExpansionReference::Layer0 => self.mqe0,
                ExpansionReference::ParentUnit => leaf.map.parent_mqe,
            };
            if should_expand(leaf.unit, leaf.depth(), reference, &self.params) {
                out.push(Violation::Depth {
                    path: format!("{}", leaf.path()),
                    mqe: leaf.unit.mqe,
                    bound: self.params.tau2 * reference,
                    assigned: leaf.unit.assigned.len(),
                });
            }
        }
        out
    }
}

fn collect<'a>(map: &'a SomMap, steps: &mut Vec<PathStep>, out: &mut Vec<NodeRef<'a>>) {
    for u in &map.units {
        steps.push(PathStep { pos: u.pos, rows: map.rows, cols: map.cols });
        out.push(NodeRef { steps: steps.clone(), unit: u, map });
        if let Some(child) = &u.child {
            collect(child, steps, out);
        }
        steps.pop();
    }
}
