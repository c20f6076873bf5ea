//! Geometry for the two cluster maps.
//!
//! * Distribution map: each leaf gets a point in the unit square. Layer `i`
//!   splits its parent's cell into `cols_i × rows_i` equal cells, so a leaf's
//!   cell has width `w_l = prod 1/cols_i`, height `h_l = prod 1/rows_i`, and
//!   its center is `sum_i w_i * X_i + w_l / 2` (likewise for y).
//! * Feature map: a squarified treemap where every unit is a rectangle with
//!   area proportional to its sample count, nested inside its parent unit.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ghsom::{GhsomTree, PathStep};

#[derive(Debug, Clone, PartialEq)]
pub struct LeafCoordinate {
    pub cluster: String,
    pub px: f64,
    pub py: f64,
    /// Width of the leaf's final-level cell.
    pub width: f64,
    /// Height of the leaf's final-level cell.
    pub height: f64,
    /// Number of samples in the leaf.
    pub count: usize,
}

/// Center and cell size `(px, py, w_l, h_l)` of the unit reached by `steps`.
pub fn cell_center(steps: &[PathStep]) -> (f64, f64, f64, f64) {
    let (mut w, mut h) = (1.0, 1.0);
    let (mut px, mut py) = (0.0, 0.0);
    for s in steps {
        w /= s.cols as f64;
        h /= s.rows as f64;
        px += w * s.pos.col as f64;
        py += h * s.pos.row as f64;
    }
    (px + w / 2.0, py + h / 2.0, w, h)
}

/// Coordinates of every leaf unit (empty ones included), depth-first.
pub fn leaf_coordinates(tree: &GhsomTree) -> Vec<LeafCoordinate> {
    tree.leaves()
        .iter()
        .map(|leaf| {
            let (px, py, width, height) = cell_center(&leaf.steps);
            LeafCoordinate {
                cluster: leaf.path().to_string(),
                px,
                py,
                width,
                height,
                count: leaf.unit.assigned.len(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Containment with an absolute slack for rounding.
    pub fn contains(&self, other: &Rect, eps: f64) -> bool {
        other.x >= self.x - eps
            && other.y >= self.y - eps
            && other.x + other.w <= self.x + self.w + eps
            && other.y + other.h <= self.y + self.h + eps
    }
}

fn worst(row_sum: f64, row_min: f64, row_max: f64, side: f64) -> f64 {
    let s2 = side * side;
    let r2 = row_sum * row_sum;
    (s2 * row_max / r2).max(r2 / (s2 * row_min))
}

/// Squarified tiling of `rect` into pieces with areas proportional to
/// `weights` (all positive). Pieces come back in input order; callers sort
/// weights descending for the usual largest-top-left look.
pub fn squarify(weights: &[f64], rect: Rect) -> Vec<Rect> {
    let total: f64 = weights.iter().sum();
    let mut out = Vec::with_capacity(weights.len());
    if weights.is_empty() || total <= 0.0 {
        return out;
    }
    let scale = rect.area() / total;
    let areas: Vec<f64> = weights.iter().map(|w| w * scale).collect();
    let mut free = rect;
    let mut i = 0;
    while i < areas.len() {
        let side = free.w.min(free.h);
        let (mut sum, mut lo, mut hi) = (areas[i], areas[i], areas[i]);
        let mut j = i + 1;
        while j < areas.len() {
            let a = areas[j];
            let next = worst(sum + a, lo.min(a), hi.max(a), side);
            if next > worst(sum, lo, hi, side) {
                break;
            }
            sum += a;
            lo = lo.min(a);
            hi = hi.max(a);
            j += 1;
        }
        let last = j == areas.len();
        if free.w >= free.h {
            // column along the left edge
            let cw = if last { free.w } else { sum / free.h };
            let mut y = free.y;
            for (k, a) in areas[i..j].iter().enumerate() {
                let h = if k + 1 == j - i { free.y + free.h - y } else { a / cw };
                out.push(Rect::new(free.x, y, cw, h));
                y += h;
            }
            free = Rect::new(free.x + cw, free.y, free.w - cw, free.h);
        } else {
            // row along the top edge
            let rh = if last { free.h } else { sum / free.w };
            let mut x = free.x;
            for (k, a) in areas[i..j].iter().enumerate() {
                let w = if k + 1 == j - i { free.x + free.w - x } else { a / rh };
                out.push(Rect::new(x, free.y, w, rh));
                x += w;
            }
            free = Rect::new(free.x, free.y + rh, free.w, free.h - rh);
        }
        i = j;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreemapNode {
    /// Cluster path name, e.g. `1x0-0x1`.
    pub name: String,
    /// 1 for first-layer units.
    pub depth: usize,
    pub rect: Rect,
    /// Sorted sample indices.
    pub members: Vec<usize>,
    /// True when no child rectangles are drawn inside this one.
    pub is_leaf: bool,
    /// Index of the enclosing node in the returned list.
    pub parent: Option<usize>,
}

/// Nested squarified layout of every non-empty unit down to `drill_depth`
/// layers (all layers when `None`). Nodes come parent-first; siblings are
/// ordered by descending sample count, ties by name.
pub fn treemap_layout(tree: &GhsomTree, canvas: Rect, drill_depth: Option<usize>) -> Vec<TreemapNode> {
    let mut out = Vec::new();
    layout_map(&tree.root, &[], canvas, None, drill_depth.unwrap_or(usize::MAX), &mut out);
    out
}

fn layout_map(
    map: &crate::som::SomMap,
    prefix: &[crate::som::GridPos],
    rect: Rect,
    parent: Option<usize>,
    max_depth: usize,
    out: &mut Vec<TreemapNode>,
) {
    let empty = map.units.iter().filter(|u| u.assigned.is_empty()).count();
    if empty > 0 {
        log::warn!("dropping {empty} empty unit(s) from the feature map");
    }
    let mut units: Vec<(String, &crate::som::Unit)> = map
        .units
        .iter()
        .filter(|u| !u.assigned.is_empty())
        .map(|u| {
            let mut p = prefix.to_vec();
            p.push(u.pos);
            (crate::partition::ClusterPath(p).to_string(), u)
        })
        .collect();
    units.sort_by(|a, b| b.1.assigned.len().cmp(&a.1.assigned.len()).then_with(|| a.0.cmp(&b.0)));
    let weights: Vec<f64> = units.iter().map(|(_, u)| u.assigned.len() as f64).collect();
    let rects = squarify(&weights, rect);
    let depth = prefix.len() + 1;
    for ((name, unit), r) in units.into_iter().zip(rects) {
        let drill = depth < max_depth && unit.child.is_some();
        let mut members = unit.assigned.clone();
        members.sort_unstable();
        let idx = out.len();
        out.push(TreemapNode { name, depth, rect: r, members, is_leaf: !drill, parent });
        if drill {
            let mut p = prefix.to_vec();
            p.push(unit.pos);
            layout_map(unit.child.as_ref().unwrap(), &p, r, Some(idx), max_depth, out);
        }
    }
}
