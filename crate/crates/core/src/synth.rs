//! Seeded synthetic datasets with known structure.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::matrix::DataMatrix;
use crate::stats;

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("finite non-negative standard deviation")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub n_samples: usize,
    pub dims: usize,
    pub blobs: usize,
    /// Per-coordinate standard deviation inside a blob.
    pub sigma: f64,
    /// Minimum Euclidean distance between blob centers.
    pub min_separation: f64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        BlobSpec { n_samples: 200, dims: 10, blobs: 4, sigma: 0.1, min_separation: 5.0 }
    }
}

/// Isotropic Gaussian blobs. Sample `i` belongs to blob `i % blobs`; labels
/// are `blob{j}`.
pub fn gaussian_blobs(spec: &BlobSpec, seed: u64) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut half_width = spec.min_separation.max(1.0);
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut attempts = 0;
    while centers.len() < spec.blobs {
        let c: Vec<f64> = (0..spec.dims).map(|_| rng.random_range(-half_width..=half_width)).collect();
        if centers.iter().all(|o| stats::distance(o, &c) >= spec.min_separation) {
            centers.push(c);
        }
        attempts += 1;
        if attempts % 1000 == 0 {
            half_width *= 2.0;
        }
    }
    let noise = normal(spec.sigma);
    let mut values = Vec::with_capacity(spec.n_samples * spec.dims);
    let mut labels = Vec::with_capacity(spec.n_samples);
    for i in 0..spec.n_samples {
        let b = i % spec.blobs;
        values.extend(centers[b].iter().map(|c| c + noise.sample(&mut rng)));
        labels.push(format!("blob{b}"));
    }
    DataMatrix::new(values, ids("s", spec.n_samples), ids("d", spec.dims), Some(labels))
        .expect("generator produces a valid matrix")
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    let width = format!("{}", n.saturating_sub(1)).len();
    (0..n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

/// Nested Gaussian clusters: each level splits every cluster into
/// `branching` children displaced by `scale` along random directions.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchySpec {
    pub dims: usize,
    /// `(branching, scale)` from the top level down.
    pub levels: Vec<(usize, f64)>,
    pub points_per_leaf: usize,
    pub sigma: f64,
}

impl Default for HierarchySpec {
    fn default() -> Self {
        HierarchySpec { dims: 6, levels: alloc::vec![(3, 12.0), (3, 3.0)], points_per_leaf: 12, sigma: 0.05 }
    }
}

/// Samples labelled with their top-level cluster (`h{i}`); leaves are
/// enumerated depth-first.
pub fn hierarchical_blobs(spec: &HierarchySpec, seed: u64) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = normal(1.0);
    let mut centers: Vec<(Vec<f64>, usize)> = alloc::vec![(alloc::vec![0.0; spec.dims], 0)];
    for (depth, &(branching, scale)) in spec.levels.iter().enumerate() {
        let mut next = Vec::with_capacity(centers.len() * branching);
        for (c, top) in &centers {
            for b in 0..branching {
                let dir: Vec<f64> = (0..spec.dims).map(|_| unit.sample(&mut rng)).collect();
                let norm = stats::sqrt(dir.iter().map(|v| v * v).sum());
                let child = c.iter().zip(&dir).map(|(x, d)| x + scale * d / norm).collect();
                next.push((child, if depth == 0 { b } else { *top }));
            }
        }
        centers = next;
    }
    let noise = normal(spec.sigma);
    let n = centers.len() * spec.points_per_leaf;
    let mut values = Vec::with_capacity(n * spec.dims);
    let mut labels = Vec::with_capacity(n);
    for (c, top) in &centers {
        for _ in 0..spec.points_per_leaf {
            values.extend(c.iter().map(|x| x + noise.sample(&mut rng)));
            labels.push(format!("h{top}"));
        }
    }
    DataMatrix::new(values, ids("s", n), ids("d", spec.dims), Some(labels)).expect("valid hierarchical matrix")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpec {
    pub clusters: usize,
    pub per_cluster: usize,
    pub noise_attributes: usize,
    pub planted_attributes: usize,
    /// Level of planted attributes inside the target cluster (0 elsewhere).
    pub planted_level: f64,
    /// Jitter on planted attributes.
    pub planted_sd: f64,
    /// Standard deviation of the shared noise attributes.
    pub noise_sd: f64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        PlantedSpec {
            clusters: 4,
            per_cluster: 25,
            noise_attributes: 50,
            planted_attributes: 3,
            planted_level: 5.0,
            planted_sd: 0.1,
            noise_sd: 1.0,
        }
    }
}

/// A labelled dataset where a few attributes separate one cluster.
#[derive(Debug, Clone)]
pub struct Planted {
    /// Labels name the clusters `c0`, `c1`, ...
    pub data: DataMatrix,
    pub target: String,
    pub planted: Vec<String>,
}

/// Attributes `planted*` sit at `planted_level` inside cluster `c0` and at 0
/// elsewhere; attributes `noise*` are i.i.d. everywhere. Column order is
/// shuffled.
pub fn planted_attributes(spec: &PlantedSpec, seed: u64) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.clusters * spec.per_cluster;
    let mut names: Vec<String> = (0..spec.planted_attributes)
        .map(|j| format!("planted{j}"))
        .chain((0..spec.noise_attributes).map(|j| format!("noise{j:02}")))
        .collect();
    names.shuffle(&mut rng);
    let jitter = normal(spec.planted_sd);
    let noise = normal(spec.noise_sd);
    let mut values = Vec::with_capacity(n * names.len());
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i / spec.per_cluster;
        for name in &names {
            let v = if name.starts_with("planted") {
                (if c == 0 { spec.planted_level } else { 0.0 }) + jitter.sample(&mut rng)
            } else {
                noise.sample(&mut rng)
            };
            values.push(v);
        }
        labels.push(format!("c{c}"));
    }
    let planted = (0..spec.planted_attributes).map(|j| format!("planted{j}")).collect();
    let data = DataMatrix::new(values, ids("s", n), names, Some(labels)).expect("valid planted matrix");
    Planted { data, target: String::from("c0"), planted }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub gene_groups: usize,
    pub genes_per_group: usize,
    pub cell_groups: usize,
    pub cells_per_group: usize,
    /// Gap between neighbouring block levels.
    pub step: f64,
    pub noise_sd: f64,
}

impl Default for BlockSpec {
    fn default() -> Self {
        BlockSpec { gene_groups: 3, genes_per_group: 20, cell_groups: 3, cells_per_group: 15, step: 3.0, noise_sd: 0.2 }
    }
}

/// A genes × cells block matrix.
#[derive(Debug, Clone)]
pub struct Blocks {
    /// Rows are genes (labelled `genes{g}`), columns are cells.
    pub data: DataMatrix,
    /// Group (`cells{c}`) of every column, in column order.
    pub cell_groups: Vec<String>,
}

/// Block `(g, c)` has level `step * ((g + c) % cell_groups)`, so every gene
/// group has its own profile over cell groups and, within a gene group, the
/// cell groups sit at distinct levels.
pub fn block_matrix(spec: &BlockSpec, seed: u64) -> Blocks {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = normal(spec.noise_sd);
    let n_genes = spec.gene_groups * spec.genes_per_group;
    let n_cells = spec.cell_groups * spec.cells_per_group;
    let mut values = Vec::with_capacity(n_genes * n_cells);
    let mut labels = Vec::with_capacity(n_genes);
    for gene in 0..n_genes {
        let g = gene / spec.genes_per_group;
        for cell in 0..n_cells {
            let c = cell / spec.cells_per_group;
            let level = spec.step * ((g + c) % spec.cell_groups) as f64;
            values.push(level + noise.sample(&mut rng));
        }
        labels.push(format!("genes{g}"));
    }
    let data = DataMatrix::new(values, ids("gene", n_genes), ids("cell", n_cells), Some(labels))
        .expect("valid block matrix");
    let cell_groups = (0..n_cells).map(|cell| format!("cells{}", cell / spec.cells_per_group)).collect();
    Blocks { data, cell_groups }
}
