//! Per-cluster features used to color the cluster maps, plus color scales.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::partition::LeafPartition;
use crate::sai;
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSpec {
    /// Mean over the cluster's samples of each sample's mean across attributes.
    Mean,
    /// Median over the cluster's samples of each sample's median across attributes.
    Median,
    /// Cluster mean of one attribute.
    Attribute(String),
    /// Distance to `target`'s mean vector over `target`'s top-`k` significant
    /// attributes.
    SignificanceDifference { target: String, k: usize },
    /// Majority reference label, with purity.
    LabelMajority,
}

impl FeatureSpec {
    pub fn is_categorical(&self) -> bool {
        matches!(self, FeatureSpec::LabelMajority)
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSpec::Mean => f.write_str("mean"),
            FeatureSpec::Median => f.write_str("median"),
            FeatureSpec::Attribute(a) => write!(f, "attribute {a}"),
            FeatureSpec::SignificanceDifference { target, .. } => write!(f, "difference to {target}"),
            FeatureSpec::LabelMajority => f.write_str("label"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Continuous(f64),
    Categorical {
        label: String,
        /// Samples carrying `label`.
        majority: usize,
        total: usize,
    },
}

impl FeatureValue {
    /// `majority / total` for categorical values.
    pub fn purity(&self) -> Option<f64> {
        match self {
            FeatureValue::Categorical { majority, total, .. } => Some(*majority as f64 / *total as f64),
            FeatureValue::Continuous(_) => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            FeatureValue::Continuous(v) => Some(*v),
            FeatureValue::Categorical { .. } => None,
        }
    }
}

/// A feature bound to a dataset, ready to evaluate any member set.
pub struct FeatureEvaluator<'a> {
    spec: FeatureSpec,
    data: &'a DataMatrix,
    attribute: usize,
    target_mean: Vec<f64>,
    significant: Vec<usize>,
}

impl<'a> FeatureEvaluator<'a> {
    pub fn new(spec: &FeatureSpec, data: &'a DataMatrix, partition: &LeafPartition) -> Result<Self> {
        let mut ev = FeatureEvaluator {
            spec: spec.clone(),
            data,
            attribute: 0,
            target_mean: Vec::new(),
            significant: Vec::new(),
        };
        match spec {
            FeatureSpec::Attribute(name) => ev.attribute = data.attribute_index(name)?,
            FeatureSpec::SignificanceDifference { target, k } => {
                let top = sai::identify_significant(partition, data, target, *k)?;
                ev.significant = top.iter().map(|s| data.attribute_index(&s.attribute)).collect::<Result<_>>()?;
                ev.target_mean = sai::mean_vector(data, partition.members(partition.cluster_index(target)?));
            }
            FeatureSpec::LabelMajority if data.labels().is_none() => return Err(Error::MissingLabels),
            _ => {}
        }
        Ok(ev)
    }

    pub fn spec(&self) -> &FeatureSpec {
        &self.spec
    }

    /// Feature of the cluster made of `members` (non-empty).
    pub fn evaluate(&self, members: &[usize]) -> FeatureValue {
        let d = self.data;
        match &self.spec {
            FeatureSpec::Mean => FeatureValue::Continuous(stats::mean(
                members.iter().map(|&i| stats::mean(d.row(i).iter().copied())),
            )),
            FeatureSpec::Median => {
                let per_sample: Vec<f64> = members.iter().map(|&i| median(d.row(i).to_vec())).collect();
                FeatureValue::Continuous(median(per_sample))
            }
            FeatureSpec::Attribute(_) => {
                FeatureValue::Continuous(stats::mean(members.iter().map(|&i| d.get(i, self.attribute))))
            }
            FeatureSpec::SignificanceDifference { .. } => {
                let m = sai::mean_vector(d, members);
                FeatureValue::Continuous(sai::restricted_distance(&self.target_mean, &m, &self.significant))
            }
            FeatureSpec::LabelMajority => {
                let labels = d.labels().expect("checked in new");
                let (label, majority) = majority_label(members.iter().map(|&i| labels[i].as_str()));
                FeatureValue::Categorical { label, majority, total: members.len() }
            }
        }
    }
}

/// Most frequent label and its count; ties go to the smallest label.
pub fn majority_label<'s, I: IntoIterator<Item = &'s str>>(labels: I) -> (String, usize) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let mut best: (&str, usize) = ("", 0);
    for (l, c) in counts {
        if c > best.1 {
            best = (l, c);
        }
    }
    (best.0.to_string(), best.1)
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl core::str::FromStr for Rgb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter { name: "color", reason: alloc::format!("expected #rrggbb, got '{s}'") };
        let hex = s.strip_prefix('#').ok_or_else(bad)?;
        if hex.len() != 6 {
            return Err(bad());
        }
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
        Ok(Rgb(byte(0)?, byte(2)?, byte(4)?))
    }
}

/// Linear two-pole scale over `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousScale {
    pub low: Rgb,
    pub high: Rgb,
    pub min: f64,
    pub max: f64,
}

pub const RED: Rgb = Rgb(215, 48, 39);
pub const BLUE: Rgb = Rgb(69, 117, 180);

impl ContinuousScale {
    /// Red at the minimum, blue at the maximum of `values`.
    pub fn fit(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            min = min.min(v);
            max = max.max(v);
        }
        if min > max {
            (min, max) = (0.0, 0.0);
        }
        ContinuousScale { low: RED, high: BLUE, min, max }
    }

    /// Position of `v` in `[0, 1]`; 0.5 when the range is degenerate.
    pub fn position(&self, v: f64) -> f64 {
        if self.max > self.min {
            ((v - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
        } else {
            0.5
        }
    }

    pub fn color(&self, v: f64) -> Rgb {
        let t = self.position(v);
        let mix = |a: u8, b: u8| libm::round(a as f64 + (b as f64 - a as f64) * t) as u8;
        Rgb(mix(self.low.0, self.high.0), mix(self.low.1, self.high.1), mix(self.low.2, self.high.2))
    }
}

/// Ten-color categorical palette, cycled.
pub const PALETTE: [Rgb; 10] = [
    Rgb(31, 119, 180),
    Rgb(255, 127, 14),
    Rgb(44, 160, 44),
    Rgb(214, 39, 40),
    Rgb(148, 103, 189),
    Rgb(140, 86, 75),
    Rgb(227, 119, 194),
    Rgb(127, 127, 127),
    Rgb(188, 189, 34),
    Rgb(23, 190, 207),
];

/// Palette entry per distinct label, in sorted label order.
pub fn categorical_colors<'s, I: IntoIterator<Item = &'s str>>(labels: I) -> Vec<(String, Rgb)> {
    let mut distinct: Vec<&str> = labels.into_iter().collect();
    distinct.sort_unstable();
    distinct.dedup();
    distinct.iter().enumerate().map(|(i, l)| (l.to_string(), PALETTE[i % PALETTE.len()])).collect()
}
