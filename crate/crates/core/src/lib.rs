//! Growing Hierarchical Self-Organizing Map (GHSOM) clustering.
//!
//! This crate is the allocation-only, IO-free core: it trains GHSOM trees,
//! flattens them into leaf partitions, ranks significant attributes per
//! cluster, scores partitions with the Calinski–Harabasz index and the
//! Adjusted Rand Index, and computes the geometry behind the cluster
//! feature map (squarified treemap) and cluster distribution map (unit
//! square coordinates).
//!
//! File formats, SVG output and the command-line tool live in the `ghsom`
//! crate.
//!
//! ```
//! use ghsom_core::{synth, GhsomParams, LeafPartition, run_ghsom};
//!
//! let data = synth::gaussian_blobs(&synth::BlobSpec { n_samples: 40, ..Default::default() }, 7);
//! let params = GhsomParams { lambda: 10, ..GhsomParams::default() };
//! let tree = run_ghsom(&data, &params).unwrap();
//! let partition = LeafPartition::from_tree(&tree);
//! assert_eq!(partition.n_samples(), 40);
//! ```

#![no_std]

extern crate alloc;

mod error;
mod rng;
mod stats;

pub mod feature;
pub mod ghsom;
pub mod layout;
pub mod matrix;
pub mod metrics;
pub mod partition;
pub mod preprocess;
pub mod sai;
pub mod som;
pub mod sweep;
pub mod synth;

pub use error::{Error, Result};
pub use ghsom::{compute_layer0, run_ghsom, ExpansionReference, GhsomParams, GhsomTree};
pub use matrix::DataMatrix;
pub use partition::{ClusterPath, LeafPartition};
pub use preprocess::{preprocess, PreprocessSpec};
pub use som::{GridPos, SomMap, Unit};
