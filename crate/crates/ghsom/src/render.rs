//! SVG renderers for the cluster feature map (nested treemap) and the
//! cluster distribution map (bubbles at leaf coordinates), plus the geometry
//! each one drew.
//!
//! Output depends only on the inputs: element order follows layout order and
//! numbers are printed with shortest round-trip formatting.

use std::fmt::Write;

use ghsom_core::feature::{self, ContinuousScale, FeatureEvaluator, FeatureSpec, FeatureValue, Rgb};
use ghsom_core::layout::{self, Rect};
use ghsom_core::{DataMatrix, GhsomTree, LeafPartition, Result};
use serde::Serialize;

use crate::json::real;

const FONT: &str = "font-family=\"Helvetica, Arial, sans-serif\"";

/// Treemap canvas.
pub const FEATURE_MAP_AREA: Rect = Rect::new(20.0, 50.0, 760.0, 570.0);
const FEATURE_MAP_SIZE: (f64, f64) = (980.0, 640.0);

/// Side of the unit square on the distribution map canvas.
pub const DISTRIBUTION_SIDE: f64 = 600.0;
pub const DISTRIBUTION_MARGIN: f64 = 40.0;
const DISTRIBUTION_SIZE: (f64, f64) = (900.0, 680.0);

/// Smallest radius of the largest bubble, in pixels.
const MIN_MAX_RADIUS: f64 = 6.0;

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Compact label for legend ticks.
fn tick(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (0.01..10_000.0).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.3e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Legend {
    Continuous {
        #[serde(serialize_with = "real")]
        min: f64,
        #[serde(serialize_with = "real")]
        max: f64,
        low: String,
        high: String,
    },
    Categorical { entries: Vec<(String, String)> },
}

/// How a cluster's feature was turned into a fill.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Paint {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purity: Option<f64>,
    pub fill: String,
    pub opacity: f64,
}

struct Painter {
    scale: Option<ContinuousScale>,
    palette: Vec<(String, Rgb)>,
}

impl Painter {
    fn new(values: &[FeatureValue], data: &DataMatrix) -> Self {
        let continuous: Vec<f64> = values.iter().filter_map(FeatureValue::as_f64).collect();
        if continuous.len() == values.len() && !values.is_empty() {
            return Painter { scale: Some(ContinuousScale::fit(continuous)), palette: Vec::new() };
        }
        let labels = data.labels().map(|l| l.iter().map(String::as_str).collect::<Vec<_>>()).unwrap_or_default();
        Painter { scale: None, palette: feature::categorical_colors(labels) }
    }

    fn paint(&self, v: &FeatureValue) -> Paint {
        match v {
            FeatureValue::Continuous(x) => Paint {
                value: Some(*x),
                label: None,
                purity: None,
                fill: self.scale.expect("continuous values fit a scale").color(*x).to_string(),
                opacity: 1.0,
            },
            FeatureValue::Categorical { label, .. } => {
                let color = self
                    .palette
                    .iter()
                    .find(|(l, _)| l == label)
                    .map(|(_, c)| *c)
                    .unwrap_or(feature::PALETTE[0]);
                Paint {
                    value: None,
                    label: Some(label.clone()),
                    purity: v.purity(),
                    fill: color.to_string(),
                    opacity: v.purity().expect("categorical"),
                }
            }
        }
    }

    fn legend(&self) -> Legend {
        match self.scale {
            Some(s) => Legend::Continuous { min: s.min, max: s.max, low: s.low.to_string(), high: s.high.to_string() },
            None => Legend::Categorical {
                entries: self.palette.iter().map(|(l, c)| (l.clone(), c.to_string())).collect(),
            },
        }
    }
}

fn draw_legend(svg: &mut String, legend: &Legend, x: f64, y: f64, title: &str) {
    let _ = writeln!(svg, "<g class=\"legend\">");
    let _ = writeln!(svg, "<text x=\"{x}\" y=\"{}\" font-size=\"13\" {FONT}>{}</text>", y - 10.0, esc(title));
    match legend {
        Legend::Continuous { min, max, low, high } => {
            let (w, h) = (24.0, 240.0);
            let _ = writeln!(
                svg,
                "<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\
                 <stop offset=\"0\" stop-color=\"{low}\"/><stop offset=\"1\" stop-color=\"{high}\"/>\
                 </linearGradient></defs>"
            );
            let _ = writeln!(svg, "<rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\" fill=\"url(#scale)\" stroke=\"#333333\"/>");
            let tx = x + w + 6.0;
            let _ = writeln!(svg, "<text x=\"{tx}\" y=\"{}\" font-size=\"11\" {FONT}>{}</text>", y + 10.0, tick(*max));
            let _ = writeln!(svg, "<text x=\"{tx}\" y=\"{}\" font-size=\"11\" {FONT}>{}</text>", y + h, tick(*min));
        }
        Legend::Categorical { entries } => {
            for (i, (label, color)) in entries.iter().enumerate() {
                let ry = y + 20.0 * i as f64;
                let _ = writeln!(svg, "<rect x=\"{x}\" y=\"{ry}\" width=\"14\" height=\"14\" fill=\"{color}\"/>");
                let _ = writeln!(svg, "<text x=\"{}\" y=\"{}\" font-size=\"11\" {FONT}>{}</text>", x + 20.0, ry + 11.0, esc(label));
            }
        }
    }
    let _ = writeln!(svg, "</g>");
}

fn open_svg(width: f64, height: f64, title: &str) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(svg, "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>");
    let _ = writeln!(svg, "<text x=\"20\" y=\"30\" font-size=\"16\" {FONT}>{}</text>", esc(title));
    svg
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RectGeometry {
    pub name: String,
    pub depth: usize,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub count: usize,
    pub is_leaf: bool,
    #[serde(flatten)]
    pub paint: Paint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureMapGeometry {
    pub feature: String,
    pub canvas: [f64; 4],
    pub legend: Legend,
    pub rects: Vec<RectGeometry>,
}

/// Nested treemap of the tree's non-empty units down to `drill_depth`
/// layers, colored by `spec`. Leaf rectangles carry their path name.
pub fn render_feature_map(
    tree: &GhsomTree,
    partition: &LeafPartition,
    data: &DataMatrix,
    spec: &FeatureSpec,
    drill_depth: Option<usize>,
) -> Result<(String, FeatureMapGeometry)> {
    let evaluator = FeatureEvaluator::new(spec, data, partition)?;
    let nodes = layout::treemap_layout(tree, FEATURE_MAP_AREA, drill_depth);
    let values: Vec<FeatureValue> = nodes.iter().map(|n| evaluator.evaluate(&n.members)).collect();
    let leaf_values: Vec<FeatureValue> =
        nodes.iter().zip(&values).filter(|(n, _)| n.is_leaf).map(|(_, v)| v.clone()).collect();
    let painter = Painter::new(&leaf_values, data);

    let (w, h) = FEATURE_MAP_SIZE;
    let mut svg = open_svg(w, h, &format!("Cluster feature map: {spec}"));
    let a = FEATURE_MAP_AREA;
    let _ = writeln!(svg, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#eeeeee\"/>", a.x, a.y, a.w, a.h);
    let mut rects = Vec::with_capacity(nodes.len());
    let _ = writeln!(svg, "<g class=\"clusters\">");
    for (node, value) in nodes.iter().zip(&values) {
        let paint = painter.paint(value);
        let r = node.rect;
        let stroke = (3.5 - 0.75 * node.depth as f64).max(0.5);
        let _ = writeln!(
            svg,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"{}\" stroke=\"#ffffff\" stroke-width=\"{stroke}\"><title>{} ({} samples)</title></rect>",
            r.x, r.y, r.w, r.h, paint.fill, paint.opacity, esc(&node.name), node.members.len()
        );
        rects.push(RectGeometry {
            name: node.name.clone(),
            depth: node.depth,
            x: r.x,
            y: r.y,
            width: r.w,
            height: r.h,
            count: node.members.len(),
            is_leaf: node.is_leaf,
            paint,
        });
    }
    for node in nodes.iter().filter(|n| n.is_leaf) {
        let r = node.rect;
        let size = (r.w.min(r.h) / 4.0).clamp(5.0, 14.0);
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"{size}\" text-anchor=\"middle\" dominant-baseline=\"middle\" {FONT}>{}</text>",
            r.x + r.w / 2.0,
            r.y + r.h / 2.0,
            esc(&node.name)
        );
    }
    let _ = writeln!(svg, "</g>");
    let legend = painter.legend();
    draw_legend(&mut svg, &legend, a.x + a.w + 30.0, a.y + 20.0, &spec.to_string());
    svg.push_str("</svg>\n");
    Ok((
        svg,
        FeatureMapGeometry { feature: spec.to_string(), canvas: [a.x, a.y, a.w, a.h], legend, rects },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleGeometry {
    pub cluster: String,
    pub px: f64,
    pub py: f64,
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub count: usize,
    #[serde(flatten)]
    pub paint: Paint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionMapGeometry {
    pub feature: String,
    /// Left, top and side of the unit square on the canvas.
    pub square: [f64; 3],
    pub legend: Legend,
    pub circles: Vec<CircleGeometry>,
}

/// One bubble per non-empty leaf at its unit-square coordinates. Bubble area
/// tracks sample count; categorical features use purity as opacity.
pub fn render_distribution_map(
    tree: &GhsomTree,
    partition: &LeafPartition,
    data: &DataMatrix,
    spec: &FeatureSpec,
) -> Result<(String, DistributionMapGeometry)> {
    let evaluator = FeatureEvaluator::new(spec, data, partition)?;
    let all = layout::leaf_coordinates(tree);
    let dropped = all.iter().filter(|c| c.count == 0).count();
    if dropped > 0 {
        log::warn!("dropping {dropped} empty leaf unit(s) from the distribution map");
    }
    let coords: Vec<_> = all.into_iter().filter(|c| c.count > 0).collect();
    let values: Vec<FeatureValue> = coords
        .iter()
        .map(|c| partition.cluster_index(&c.cluster).map(|i| evaluator.evaluate(partition.members(i))))
        .collect::<Result<_>>()?;
    let painter = Painter::new(&values, data);

    let (s, m) = (DISTRIBUTION_SIDE, DISTRIBUTION_MARGIN);
    let max_count = coords.iter().map(|c| c.count).max().unwrap_or(1) as f64;
    let min_cell = coords.iter().map(|c| c.width.min(c.height)).fold(1.0, f64::min);
    let max_radius = (0.5 * s * min_cell).max(MIN_MAX_RADIUS);

    let (w, h) = DISTRIBUTION_SIZE;
    let mut svg = open_svg(w, h, &format!("Cluster distribution map: {spec}"));
    let _ = writeln!(svg, "<rect x=\"{m}\" y=\"{m}\" width=\"{s}\" height=\"{s}\" fill=\"#f7f7f7\" stroke=\"#999999\"/>");
    let _ = writeln!(svg, "<g class=\"grid\" stroke=\"#cccccc\" stroke-dasharray=\"4 4\">");
    for c in 1..tree.root.cols {
        let x = m + s * c as f64 / tree.root.cols as f64;
        let _ = writeln!(svg, "<line x1=\"{x}\" y1=\"{m}\" x2=\"{x}\" y2=\"{}\"/>", m + s);
    }
    for r in 1..tree.root.rows {
        let y = m + s * r as f64 / tree.root.rows as f64;
        let _ = writeln!(svg, "<line x1=\"{m}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\"/>", m + s);
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "<g class=\"clusters\">");
    let mut circles = Vec::with_capacity(coords.len());
    for (c, v) in coords.iter().zip(&values) {
        let paint = painter.paint(v);
        let (cx, cy) = (m + c.px * s, m + c.py * s);
        let r = max_radius * (c.count as f64 / max_count).sqrt();
        let _ = writeln!(
            svg,
            "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\" fill=\"{}\" fill-opacity=\"{}\" stroke=\"#333333\" stroke-width=\"0.5\"><title>{} ({} samples)</title></circle>",
            paint.fill, paint.opacity, esc(&c.cluster), c.count
        );
        circles.push(CircleGeometry {
            cluster: c.cluster.clone(),
            px: c.px,
            py: c.py,
            cx,
            cy,
            r,
            count: c.count,
            paint,
        });
    }
    let _ = writeln!(svg, "</g>");
    let legend = painter.legend();
    draw_legend(&mut svg, &legend, m + s + 40.0, m + 20.0, &spec.to_string());
    svg.push_str("</svg>\n");
    Ok((svg, DistributionMapGeometry { feature: spec.to_string(), square: [m, m, s], legend, circles }))
}
