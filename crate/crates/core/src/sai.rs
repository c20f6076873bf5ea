//! Significant attribute identification.
//!
//! For a target cluster `c` and attribute `g`:
//!
//! * `sigma_i(c, g)`: population standard deviation of `g` inside `c`;
//! * `sigma_b(c, g)`: `sqrt(sum_{c' != c} (m_c - m_c')^2 / (|C| - 1))`, the
//!   spread of `g`'s cluster means around the target's mean;
//! * `diff = sigma_b - sigma_i`.
//!
//! Attributes are ranked by descending `diff`, ties by ascending name.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::partition::LeafPartition;
use crate::stats;

pub const DEFAULT_TOP_K: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeScore {
    pub cluster: String,
    pub attribute: String,
    pub sigma_i: f64,
    pub sigma_b: f64,
    pub diff: f64,
    /// 1-based.
    pub rank: usize,
}

/// Per-cluster attribute means, computed once and shared by every score.
#[derive(Debug, Clone)]
pub struct ClusterMeans {
    /// `means[cluster][attribute]`
    means: Vec<Vec<f64>>,
}

impl ClusterMeans {
    pub fn new(partition: &LeafPartition, data: &DataMatrix) -> Result<Self> {
        check_shapes(partition, data)?;
        let means = (0..partition.n_clusters())
            .map(|c| mean_vector(data, partition.members(c)))
            .collect();
        Ok(ClusterMeans { means })
    }

    pub fn mean(&self, cluster: usize, attribute: usize) -> f64 {
        self.means[cluster][attribute]
    }

    pub fn vector(&self, cluster: usize) -> &[f64] {
        &self.means[cluster]
    }
}

fn check_shapes(partition: &LeafPartition, data: &DataMatrix) -> Result<()> {
    if partition.n_samples() != data.n_samples() {
        return Err(Error::LengthMismatch {
            what: "partition",
            expected: data.n_samples(),
            found: partition.n_samples(),
        });
    }
    Ok(())
}

/// Mean of every attribute over `rows`.
pub fn mean_vector(data: &DataMatrix, rows: &[usize]) -> Vec<f64> {
    (0..data.n_attributes())
        .map(|j| stats::mean(rows.iter().map(|&i| data.get(i, j))))
        .collect()
}

fn within(data: &DataMatrix, members: &[usize], attribute: usize, mean: f64) -> f64 {
    let ss: f64 = members.iter().map(|&i| stats::sq(data.get(i, attribute) - mean)).sum();
    stats::sqrt(ss / members.len() as f64)
}

fn between(means: &ClusterMeans, cluster: usize, attribute: usize) -> f64 {
    let n_clusters = means.means.len();
    let target = means.mean(cluster, attribute);
    let ss: f64 = (0..n_clusters)
        .filter(|&c| c != cluster)
        .map(|c| stats::sq(target - means.mean(c, attribute)))
        .sum();
    stats::sqrt(ss / (n_clusters - 1) as f64)
}

fn resolve(partition: &LeafPartition, data: &DataMatrix, cluster: &str, attribute: &str) -> Result<(usize, usize)> {
    check_shapes(partition, data)?;
    Ok((partition.cluster_index(cluster)?, data.attribute_index(attribute)?))
}

pub fn sigma_within(partition: &LeafPartition, data: &DataMatrix, cluster: &str, attribute: &str) -> Result<f64> {
    let (c, g) = resolve(partition, data, cluster, attribute)?;
    let members = partition.members(c);
    let m = stats::mean(members.iter().map(|&i| data.get(i, g)));
    Ok(within(data, members, g, m))
}

pub fn sigma_between(partition: &LeafPartition, data: &DataMatrix, cluster: &str, attribute: &str) -> Result<f64> {
    let (c, g) = resolve(partition, data, cluster, attribute)?;
    if partition.n_clusters() < 2 {
        return Err(Error::TooFewClusters { needed: 2, found: partition.n_clusters() });
    }
    Ok(between(&ClusterMeans::new(partition, data)?, c, g))
}

/// Scores and ranks every attribute for `cluster`.
pub fn score_attributes(partition: &LeafPartition, data: &DataMatrix, cluster: &str) -> Result<Vec<AttributeScore>> {
    check_shapes(partition, data)?;
    let c = partition.cluster_index(cluster)?;
    if partition.n_clusters() < 2 {
        return Err(Error::TooFewClusters { needed: 2, found: partition.n_clusters() });
    }
    let means = ClusterMeans::new(partition, data)?;
    let members = partition.members(c);
    let mut scores: Vec<AttributeScore> = data
        .attribute_names()
        .iter()
        .enumerate()
        .map(|(g, name)| {
            let sigma_i = within(data, members, g, means.mean(c, g));
            let sigma_b = between(&means, c, g);
            AttributeScore {
                cluster: String::from(cluster),
                attribute: name.clone(),
                sigma_i,
                sigma_b,
                diff: sigma_b - sigma_i,
                rank: 0,
            }
        })
        .collect();
    scores.sort_by(|a, b| b.diff.total_cmp(&a.diff).then_with(|| a.attribute.cmp(&b.attribute)));
    for (i, s) in scores.iter_mut().enumerate() {
        s.rank = i + 1;
    }
    Ok(scores)
}

/// The `k` highest-ranked attributes for `cluster`.
pub fn identify_significant(
    partition: &LeafPartition,
    data: &DataMatrix,
    cluster: &str,
    k: usize,
) -> Result<Vec<AttributeScore>> {
    if k == 0 || k > data.n_attributes() {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: alloc::format!("must be in 1..={}, got {k}", data.n_attributes()),
        });
    }
    let mut scores = score_attributes(partition, data, cluster)?;
    scores.truncate(k);
    Ok(scores)
}

/// `min(DEFAULT_TOP_K, n_attributes)`.
pub fn default_k(data: &DataMatrix) -> usize {
    DEFAULT_TOP_K.min(data.n_attributes())
}

/// Distance from `target`'s mean vector to every cluster's mean vector,
/// restricted to `target`'s top-`k` significant attributes. Keyed by
/// cluster name in partition order; `target` maps to 0.
pub fn significance_difference_feature(
    partition: &LeafPartition,
    data: &DataMatrix,
    target: &str,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    let top = identify_significant(partition, data, target, k)?;
    let attrs: Vec<usize> = top.iter().map(|s| data.attribute_index(&s.attribute)).collect::<Result<_>>()?;
    let means = ClusterMeans::new(partition, data)?;
    let t = partition.cluster_index(target)?;
    Ok(partition
        .names()
        .iter()
        .enumerate()
        .map(|(c, name)| (name.clone(), restricted_distance(means.vector(t), means.vector(c), &attrs)))
        .collect())
}

/// Euclidean distance between `a` and `b` over the listed coordinates only.
pub fn restricted_distance(a: &[f64], b: &[f64], coords: &[usize]) -> f64 {
    stats::sqrt(coords.iter().map(|&j| stats::sq(a[j] - b[j])).sum())
}
