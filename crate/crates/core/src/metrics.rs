//! Cluster validity: Calinski–Harabasz (internal) and Adjusted Rand Index
//! (external).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::partition::LeafPartition;

/// Calinski–Harabasz index of a flat partition.
///
/// `(BGSS / (K - 1)) / (WGSS / (N - K))`. Returns `f64::INFINITY` when every
/// cluster is a single repeated point but the centroids differ.
pub fn ch_index(partition: &LeafPartition, data: &DataMatrix) -> Result<f64> {
    if partition.n_samples() != data.n_samples() {
        return Err(Error::LengthMismatch {
            what: "partition",
            expected: data.n_samples(),
            found: partition.n_samples(),
        });
    }
    calinski_harabasz(data, partition.assignment())
}

/// Same as [`ch_index`] on raw cluster indices (`0..K`, gaps allowed).
pub fn calinski_harabasz(data: &DataMatrix, assignment: &[usize]) -> Result<f64> {
    let n = data.n_samples();
    if assignment.len() != n {
        return Err(Error::LengthMismatch { what: "assignment", expected: n, found: assignment.len() });
    }
    let d = data.n_attributes();
    let slots = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut sums = vec![vec![0.0; d]; slots];
    let mut counts = vec![0usize; slots];
    let mut global = vec![0.0; d];
    for (i, &k) in assignment.iter().enumerate() {
        counts[k] += 1;
        for (j, v) in data.row(i).iter().enumerate() {
            sums[k][j] += v;
            global[j] += v;
        }
    }
    let k_nonempty = counts.iter().filter(|&&c| c > 0).count();
    if k_nonempty < 2 {
        return Err(Error::TooFewClusters { needed: 2, found: k_nonempty });
    }
    if n <= k_nonempty {
        return Err(Error::TooFewSamples { needed: k_nonempty + 1, found: n });
    }
    global.iter_mut().for_each(|v| *v /= n as f64);
    let centroids: Vec<Vec<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s.iter().map(|v| if c > 0 { v / c as f64 } else { 0.0 }).collect())
        .collect();

    let mut bgss = 0.0;
    for (c, &cnt) in centroids.iter().zip(&counts) {
        if cnt > 0 {
            let dist: f64 = c.iter().zip(&global).map(|(a, b)| (a - b) * (a - b)).sum();
            bgss += cnt as f64 * dist;
        }
    }
    let mut wgss = 0.0;
    for (i, &k) in assignment.iter().enumerate() {
        wgss += data.row(i).iter().zip(&centroids[k]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    if wgss == 0.0 {
        return if bgss > 0.0 { Ok(f64::INFINITY) } else { Err(Error::DegenerateDispersion) };
    }
    let k = k_nonempty as f64;
    Ok((bgss / (k - 1.0)) / (wgss / (n as f64 - k)))
}

fn pairs(n: usize) -> i128 {
    let n = n as i128;
    n * (n - 1) / 2
}

/// Adjusted Rand Index between two labelings of the same samples.
///
/// Only the grouping matters; label values are compared for equality.
/// When the chance-corrected denominator vanishes the two labelings are
/// necessarily identical (both all-singletons or both one cluster) and 1 is
/// returned.
pub fn adjusted_rand_index<A: Ord, B: Ord>(clusters: &[A], labels: &[B]) -> Result<f64> {
    if clusters.len() != labels.len() {
        return Err(Error::LengthMismatch { what: "labels", expected: clusters.len(), found: labels.len() });
    }
    if clusters.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: clusters.len() });
    }
    let mut table: BTreeMap<(&A, &B), usize> = BTreeMap::new();
    let mut rows: BTreeMap<&A, usize> = BTreeMap::new();
    let mut cols: BTreeMap<&B, usize> = BTreeMap::new();
    for (a, b) in clusters.iter().zip(labels) {
        *table.entry((a, b)).or_default() += 1;
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
    }
    // Pair counts are integers, so the index is formed as one exact ratio
    // scaled by 2 * C(n, 2) and rounded once.
    let index: i128 = table.values().map(|&c| pairs(c)).sum();
    let sum_rows: i128 = rows.values().map(|&c| pairs(c)).sum();
    let sum_cols: i128 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(clusters.len());
    let numer = 2 * (index * total - sum_rows * sum_cols);
    let denom = (sum_rows + sum_cols) * total - 2 * sum_rows * sum_cols;
    if denom == 0 {
        log::warn!("ARI denominator is zero; labelings are trivially identical");
        return Ok(1.0);
    }
    Ok(numer as f64 / denom as f64)
}

/// ARI of a leaf partition against per-sample reference labels.
pub fn ari<S: AsRef<str>>(partition: &LeafPartition, labels: &[S]) -> Result<f64> {
    let refs: Vec<&str> = labels.iter().map(AsRef::as_ref).collect();
    adjusted_rand_index(partition.assignment(), &refs)
}
