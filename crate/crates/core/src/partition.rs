//! Hierarchical cluster names and the flat leaf partition.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::ghsom::GhsomTree;
use crate::som::GridPos;

/// Path from a first-layer unit down to a unit, one grid position per layer.
/// Displayed as `{col}x{row}` tokens joined by `-`, e.g. `0x0-2x1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClusterPath(pub Vec<GridPos>);

impl ClusterPath {
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// True when `self` equals `ancestor` or lies below it.
    pub fn starts_with(&self, ancestor: &ClusterPath) -> bool {
        self.0.starts_with(&ancestor.0)
    }
}

impl fmt::Display for ClusterPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for ClusterPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownCluster(s.to_string());
        if s.is_empty() {
            return Err(bad());
        }
        s.split('-')
            .map(|tok| {
                let (c, r) = tok.split_once('x').ok_or_else(bad)?;
                Ok(GridPos::new(c.parse().map_err(|_| bad())?, r.parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<_>>>()
            .map(ClusterPath)
    }
}

/// Every sample assigned to exactly one named cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafPartition {
    names: Vec<String>,
    members: Vec<Vec<usize>>,
    assignment: Vec<usize>,
}

impl LeafPartition {
    /// Non-empty leaf units of `tree`, in depth-first row-major order.
    pub fn from_tree(tree: &GhsomTree) -> Self {
        let n = tree.sample_ids.len();
        let mut names = Vec::new();
        let mut members = Vec::new();
        let mut assignment = alloc::vec![usize::MAX; n];
        for leaf in tree.leaves() {
            if leaf.unit.assigned.is_empty() {
                continue;
            }
            let idx = names.len();
            names.push(leaf.path().to_string());
            let mut m = leaf.unit.assigned.clone();
            m.sort_unstable();
            for &s in &m {
                assignment[s] = idx;
            }
            members.push(m);
        }
        debug_assert!(assignment.iter().all(|&a| a != usize::MAX));
        LeafPartition { names, members, assignment }
    }

    /// Builds a partition from one cluster name per sample. Clusters are
    /// ordered by first appearance.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Self {
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        let mut names = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            let l = l.as_ref();
            let idx = *index.entry(l).or_insert_with(|| {
                names.push(l.to_string());
                members.push(Vec::new());
                names.len() - 1
            });
            members[idx].push(i);
            assignment.push(idx);
        }
        LeafPartition { names, members, assignment }
    }

    pub fn n_samples(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Cluster index of every sample.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn members(&self, cluster: usize) -> &[usize] {
        &self.members[cluster]
    }

    pub fn cluster_index(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownCluster(name.to_string()))
    }

    pub fn label_of(&self, sample: usize) -> &str {
        &self.names[self.assignment[sample]]
    }

    /// Members of a leaf or of an internal cluster (the union of its
    /// descendant leaves), sorted by sample index.
    pub fn members_under(&self, name: &str) -> Result<Vec<usize>> {
        let prefix: ClusterPath = name.parse()?;
        let mut out = Vec::new();
        for (i, n) in self.names.iter().enumerate() {
            let matches = match n.parse::<ClusterPath>() {
                Ok(p) => p.starts_with(&prefix),
                Err(_) => n == name,
            };
            if matches {
                out.extend_from_slice(&self.members[i]);
            }
        }
        if out.is_empty() {
            return Err(Error::UnknownCluster(name.to_string()));
        }
        out.sort_unstable();
        Ok(out)
    }
}
