//! Command-line workflow: ingest, preprocess, cluster, sweep, rank
//! attributes and render.
//!
//! Commands communicate through files in an output directory. `cluster`
//! writes the trained tree and the exact matrix it was trained on, and every
//! later command reads those two files back.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ghsom_core::feature::FeatureSpec;
use ghsom_core::preprocess::DEFAULT_SCALE_FACTOR;
use ghsom_core::sweep::{self, SweepCell, SweepGrid};
use ghsom_core::synth;
use ghsom_core::{sai, DataMatrix, ExpansionReference, GhsomParams, GhsomTree, LeafPartition, PreprocessSpec};
use serde::Serialize;

use crate::json::{self, ParamsDoc};
use crate::render;
use crate::table;

pub const TREE_FILE: &str = "tree.json";
pub const PARTITION_FILE: &str = "partition.csv";
pub const DATA_FILE: &str = "data.csv";
pub const CONFIG_FILE: &str = "config.json";
pub const SAI_FILE: &str = "sai.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_BEST_FILE: &str = "sweep_best.json";
pub const SWEEP_CONFIG_FILE: &str = "sweep_config.json";
pub const FEATURE_MAP_FILE: &str = "feature_map.svg";
pub const FEATURE_MAP_GEOMETRY_FILE: &str = "feature_map.json";
pub const DISTRIBUTION_MAP_FILE: &str = "distribution_map.svg";
pub const DISTRIBUTION_MAP_GEOMETRY_FILE: &str = "distribution_map.json";
pub const STAGE2_DIR: &str = "stage2";

#[derive(Debug, Parser)]
#[command(name = "ghsom", version, about = "Growing hierarchical self-organizing map clustering")]
pub struct Cli {
    /// Worker threads for sweeps and sibling maps (default: all cores).
    #[arg(long, global = true, env = "GHSOM_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a GHSOM tree and write tree.json, partition.csv, data.csv and config.json.
    Cluster(ClusterArgs),
    /// Score a grid of (tau1, tau2) pairs with CH and, given labels, ARI.
    Sweep(SweepArgs),
    /// Rank the significant attributes of a clustered run.
    Sai(SaiArgs),
    /// Render the nested treemap of a clustered run.
    RenderFeatureMap(RenderArgs),
    /// Render the bubble map of a clustered run.
    RenderDistributionMap(RenderArgs),
    /// Re-cluster the attributes of a picked cluster (rows) after transposing.
    PipelineCrispr(PipelineArgs),
    /// Write a synthetic test dataset.
    GenSynthetic(GenArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// CSV matrix: header row, sample ids in the first column.
    #[arg(long, env = "GHSOM_INPUT")]
    pub input: PathBuf,
    /// Column holding reference labels; it is not used as an attribute.
    #[arg(long, env = "GHSOM_LABELS_COLUMN")]
    pub labels_column: Option<String>,
    /// Swap rows and columns before anything else (drops labels).
    #[arg(long, env = "GHSOM_TRANSPOSE")]
    pub transpose: bool,
    /// Per-sample library-size normalization followed by ln(1 + x).
    #[arg(long, env = "GHSOM_LOG_NORMALIZE")]
    pub log_normalize: bool,
    #[arg(long, env = "GHSOM_SCALE_FACTOR", default_value_t = DEFAULT_SCALE_FACTOR)]
    pub scale_factor: f64,
    /// Keep only the k highest-variance attributes.
    #[arg(long, env = "GHSOM_TOP_K_VARIABLE")]
    pub top_k_variable: Option<usize>,
    /// Standardize every attribute to mean 0 and unit variance.
    #[arg(long, env = "GHSOM_ZSCORE")]
    pub zscore: bool,
}

impl InputArgs {
    pub fn preprocess_spec(&self) -> PreprocessSpec {
        PreprocessSpec {
            transpose: self.transpose,
            log_normalize: self.log_normalize.then_some(self.scale_factor),
            top_k_variable: self.top_k_variable,
            zscore_scale: self.zscore,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    Layer0,
    ParentUnit,
}

#[derive(Debug, Clone, Args)]
pub struct GhsomArgs {
    #[arg(long, env = "GHSOM_TAU1", default_value_t = 0.1)]
    pub tau1: f64,
    #[arg(long, env = "GHSOM_TAU2", default_value_t = 0.1)]
    pub tau2: f64,
    /// Training epochs between growth checks.
    #[arg(long, env = "GHSOM_LAMBDA", default_value_t = 100)]
    pub lambda: usize,
    #[arg(long, env = "GHSOM_ALPHA0", default_value_t = 0.5)]
    pub alpha0: f64,
    /// Initial neighbourhood radius (default: half the larger grid side).
    #[arg(long, env = "GHSOM_SIGMA0")]
    pub sigma0: Option<f64>,
    #[arg(long, env = "GHSOM_MAX_DEPTH", default_value_t = 10)]
    pub max_depth: usize,
    #[arg(long, env = "GHSOM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Error a unit is compared against when deciding to expand it.
    #[arg(long, env = "GHSOM_EXPANSION_REFERENCE", value_enum, default_value_t = Reference::Layer0)]
    pub expansion_reference: Reference,
}

impl GhsomArgs {
    pub fn params(&self) -> GhsomParams {
        GhsomParams {
            tau1: self.tau1,
            tau2: self.tau2,
            lambda: self.lambda,
            alpha0: self.alpha0,
            sigma0: self.sigma0,
            max_depth: self.max_depth,
            seed: self.seed,
            expansion_reference: match self.expansion_reference {
                Reference::Layer0 => ExpansionReference::Layer0,
                Reference::ParentUnit => ExpansionReference::ParentUnit,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub ghsom: GhsomArgs,
    #[arg(long, env = "GHSOM_OUT_DIR")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Thresholds other than tau1 and tau2 are taken from here.
    #[command(flatten)]
    pub ghsom: GhsomArgs,
    #[arg(long, env = "GHSOM_TAU1_LIST", value_delimiter = ',', required = true)]
    pub tau1_list: Vec<f64>,
    #[arg(long, env = "GHSOM_TAU2_LIST", value_delimiter = ',', required = true)]
    pub tau2_list: Vec<f64>,
    #[arg(long, env = "GHSOM_OUT_DIR")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SaiArgs {
    /// Directory written by `cluster`.
    #[arg(long, env = "GHSOM_OUT_DIR")]
    pub out_dir: PathBuf,
    /// Leaf to rank attributes for (default: every leaf).
    #[arg(long, alias = "target-cluster", env = "GHSOM_CLUSTER")]
    pub cluster: Option<String>,
    /// Attributes to keep per cluster (default: min(10, attributes)).
    #[arg(long, env = "GHSOM_K")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeatureKind {
    /// Mean of per-sample means.
    Mean,
    /// Median of per-sample medians.
    Median,
    /// Cluster mean of --attribute.
    Attribute,
    /// Distance to --target-cluster over its top --k attributes.
    Difference,
    /// Majority reference label, opacity = purity.
    Label,
}

#[derive(Debug, Clone, Args)]
pub struct FeatureArgs {
    #[arg(long, env = "GHSOM_FEATURE", value_enum, default_value_t = FeatureKind::Mean)]
    pub feature: FeatureKind,
    #[arg(long, env = "GHSOM_ATTRIBUTE")]
    pub attribute: Option<String>,
    #[arg(long, env = "GHSOM_TARGET_CLUSTER")]
    pub target_cluster: Option<String>,
    /// Significant attributes used by `--feature difference`.
    #[arg(long, env = "GHSOM_K")]
    pub k: Option<usize>,
}

impl FeatureArgs {
    pub fn spec(&self, data: &DataMatrix) -> Result<FeatureSpec> {
        Ok(match self.feature {
            FeatureKind::Mean => FeatureSpec::Mean,
            FeatureKind::Median => FeatureSpec::Median,
            FeatureKind::Label => FeatureSpec::LabelMajority,
            FeatureKind::Attribute => FeatureSpec::Attribute(
                self.attribute.clone().ok_or_else(|| anyhow!("--feature attribute needs --attribute"))?,
            ),
            FeatureKind::Difference => FeatureSpec::SignificanceDifference {
                target: self
                    .target_cluster
                    .clone()
                    .ok_or_else(|| anyhow!("--feature difference needs --target-cluster"))?,
                k: self.k.unwrap_or_else(|| sai::default_k(data)),
            },
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Directory written by `cluster`.
    #[arg(long, env = "GHSOM_OUT_DIR")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub feature: FeatureArgs,
    /// Layers of nesting to draw (feature map only; default: all).
    #[arg(long, env = "GHSOM_DRILL_DEPTH")]
    pub drill_depth: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Directory written by a first-stage `cluster` run; results go to its
    /// `stage2` subdirectory.
    #[arg(long, env = "GHSOM_OUT_DIR")]
    pub out_dir: PathBuf,
    /// Leaf or internal cluster whose members become the new attributes.
    #[arg(long, env = "GHSOM_PICK")]
    pub pick: String,
    #[command(flatten)]
    pub ghsom: GhsomArgs,
    #[arg(long, env = "GHSOM_K")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    /// Four separated Gaussian blobs.
    Blobs,
    /// Nested blobs; labels name the top-level group.
    Hierarchy,
    /// Three attributes separating one cluster among noise attributes.
    Planted,
    /// Genes x cells block matrix.
    Blocks,
}

impl SyntheticKind {
    fn name(self) -> &'static str {
        match self {
            SyntheticKind::Blobs => "blobs",
            SyntheticKind::Hierarchy => "hierarchy",
            SyntheticKind::Planted => "planted",
            SyntheticKind::Blocks => "blocks",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, env = "GHSOM_KIND", value_enum)]
    pub kind: SyntheticKind,
    #[arg(long, env = "GHSOM_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "GHSOM_OUT_DIR")]
    pub out_dir: PathBuf,
}

/// Fully materialized settings of a `cluster` run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(flatten)]
    pub input: InputArgs,
    pub params: ParamsDoc,
    pub out_dir: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().context("starting the thread pool")?;
            pool.install(|| dispatch(cli.command))
        }
        None => dispatch(cli.command),
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Cluster(a) => cmd_cluster(&a).map(drop),
        Command::Sweep(a) => cmd_sweep(&a).map(drop),
        Command::Sai(a) => cmd_sai(&a).map(drop),
        Command::RenderFeatureMap(a) => cmd_render_feature_map(&a),
        Command::RenderDistributionMap(a) => cmd_render_distribution_map(&a),
        Command::PipelineCrispr(a) => cmd_pipeline_crispr(&a).map(drop),
        Command::GenSynthetic(a) => cmd_gen_synthetic(&a).map(drop),
    }
}

/// Reads and preprocesses the input matrix.
pub fn ingest(input: &InputArgs) -> Result<DataMatrix> {
    if !input.input.exists() {
        bail!("input file {} does not exist", input.input.display());
    }
    let raw = table::load_csv(&input.input, input.labels_column.as_deref())
        .with_context(|| format!("reading input {}", input.input.display()))?;
    if input.transpose && raw.labels().is_some() {
        log::warn!("--transpose drops the labels column");
    }
    let data = ghsom_core::preprocess(&raw, &input.preprocess_spec()).context("preprocessing")?;
    log::info!("loaded {} samples x {} attributes", data.n_samples(), data.n_attributes());
    Ok(data)
}

/// Writes tree, partition, training matrix and `config` into `out_dir`.
fn write_run(out_dir: &Path, tree: &GhsomTree, data: &DataMatrix, config: &impl Serialize) -> Result<LeafPartition> {
    let partition = LeafPartition::from_tree(tree);
    json::write_tree(tree, &out_dir.join(TREE_FILE))?;
    table::write_partition(&partition, data.sample_ids(), &out_dir.join(PARTITION_FILE))?;
    table::save_csv(data, &out_dir.join(DATA_FILE))?;
    json::write(config, &out_dir.join(CONFIG_FILE))?;
    Ok(partition)
}

fn train(data: &DataMatrix, params: &GhsomParams) -> Result<GhsomTree> {
    let tree = ghsom_core::run_ghsom(data, params).context("training")?;
    log::info!("trained {} units, {} leaves, depth {}", tree.unit_count(), tree.leaf_count(), tree.max_depth());
    Ok(tree)
}

pub fn cmd_cluster(args: &ClusterArgs) -> Result<(GhsomTree, LeafPartition)> {
    let data = ingest(&args.input).context("cluster")?;
    let params = args.ghsom.params();
    let tree = train(&data, &params).context("cluster")?;
    let config = RunConfig {
        command: "cluster",
        input: args.input.clone(),
        params: ParamsDoc::from(&params),
        out_dir: args.out_dir.clone(),
    };
    let partition = write_run(&args.out_dir, &tree, &data, &config).context("cluster: writing outputs")?;
    Ok((tree, partition))
}

#[derive(Serialize)]
struct CellDoc {
    #[serde(serialize_with = "json::real")]
    tau1: f64,
    #[serde(serialize_with = "json::real")]
    tau2: f64,
    #[serde(serialize_with = "json::real")]
    ch: f64,
    ari: Option<f64>,
    leaf_count: usize,
    depth: usize,
    unit_count: usize,
}

impl CellDoc {
    fn from_cell(c: &SweepCell) -> Option<Self> {
        let s = c.outcome.as_ref().ok()?;
        Some(CellDoc {
            tau1: c.tau1,
            tau2: c.tau2,
            ch: s.ch,
            ari: s.ari,
            leaf_count: s.leaf_count,
            depth: s.depth,
            unit_count: s.unit_count,
        })
    }
}

#[derive(Serialize)]
struct SweepBest {
    best_ch: Option<CellDoc>,
    best_ari: Option<CellDoc>,
    succeeded: usize,
    failed: usize,
}

#[derive(Serialize)]
struct SweepConfig<'a> {
    command: &'static str,
    #[serde(flatten)]
    input: &'a InputArgs,
    params: ParamsDoc,
    tau1_list: &'a [f64],
    tau2_list: &'a [f64],
    out_dir: &'a Path,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<SweepGrid> {
    let data = ingest(&args.input).context("sweep")?;
    let params = args.ghsom.params();
    let labels = data.labels();
    let grid = sweep::sweep(&data, &params, &args.tau1_list, &args.tau2_list, labels).context("sweep")?;
    for c in &grid.cells {
        if let Err(e) = &c.outcome {
            log::warn!("cell tau1={} tau2={} failed: {e}", c.tau1, c.tau2);
        }
    }
    let out = &args.out_dir;
    table::write_sweep(&grid, &out.join(SWEEP_FILE)).context("sweep: writing outputs")?;
    let best = SweepBest {
        best_ch: grid.best_ch().and_then(CellDoc::from_cell),
        best_ari: grid.best_ari().and_then(CellDoc::from_cell),
        succeeded: grid.succeeded(),
        failed: grid.cells.len() - grid.succeeded(),
    };
    json::write(&best, &out.join(SWEEP_BEST_FILE)).context("sweep: writing outputs")?;
    let config = SweepConfig {
        command: "sweep",
        input: &args.input,
        params: ParamsDoc::from(&params),
        tau1_list: &grid.tau1_values,
        tau2_list: &grid.tau2_values,
        out_dir: out,
    };
    json::write(&config, &out.join(SWEEP_CONFIG_FILE)).context("sweep: writing outputs")?;
    if grid.succeeded() == 0 {
        bail!("sweep: every cell failed");
    }
    Ok(grid)
}

/// Tree and training matrix written by a `cluster` run.
pub fn load_run(out_dir: &Path) -> Result<(GhsomTree, DataMatrix)> {
    let tree_path = out_dir.join(TREE_FILE);
    let data_path = out_dir.join(DATA_FILE);
    for p in [&tree_path, &data_path] {
        if !p.exists() {
            bail!("{} does not exist; run `ghsom cluster --out-dir {}` first", p.display(), out_dir.display());
        }
    }
    let tree = json::read_tree(&tree_path)?;
    let header = csv::Reader::from_path(&data_path)
        .and_then(|mut r| r.headers().cloned())
        .with_context(|| format!("reading {}", data_path.display()))?;
    let label = (header.len() > 2 && header.iter().next_back() == Some(table::LABEL_HEADER)).then_some(table::LABEL_HEADER);
    let data = table::load_csv(&data_path, label)?;
    if data.sample_ids() != tree.sample_ids.as_slice() || data.attribute_names() != tree.attribute_names.as_slice() {
        bail!("{} does not match {}", data_path.display(), tree_path.display());
    }
    Ok((tree, data))
}

fn unknown_cluster(name: &str, partition: &LeafPartition) -> anyhow::Error {
    anyhow!("unknown cluster '{name}'; valid leaves: {}", partition.names().join(", "))
}

pub fn cmd_sai(args: &SaiArgs) -> Result<Vec<sai::AttributeScore>> {
    let (tree, data) = load_run(&args.out_dir).context("sai: loading the clustered run")?;
    let partition = LeafPartition::from_tree(&tree);
    let scores = rank_attributes(&partition, &data, args.cluster.as_deref(), args.k).context("sai")?;
    table::write_scores(&scores, &args.out_dir.join(SAI_FILE)).context("sai: writing outputs")?;
    Ok(scores)
}

fn rank_attributes(
    partition: &LeafPartition,
    data: &DataMatrix,
    cluster: Option<&str>,
    k: Option<usize>,
) -> Result<Vec<sai::AttributeScore>> {
    let k = k.unwrap_or_else(|| sai::default_k(data));
    let clusters: Vec<&str> = match cluster {
        Some(c) => {
            partition.cluster_index(c).map_err(|_| unknown_cluster(c, partition))?;
            vec![c]
        }
        None => partition.names().iter().map(String::as_str).collect(),
    };
    let mut out = Vec::new();
    for c in clusters {
        out.extend(sai::identify_significant(partition, data, c, k)?);
    }
    Ok(out)
}

fn check_target(spec: &FeatureSpec, partition: &LeafPartition) -> Result<()> {
    if let FeatureSpec::SignificanceDifference { target, .. } = spec {
        partition.cluster_index(target).map_err(|_| unknown_cluster(target, partition))?;
    }
    Ok(())
}

fn write_feature_map(
    out_dir: &Path,
    tree: &GhsomTree,
    partition: &LeafPartition,
    data: &DataMatrix,
    spec: &FeatureSpec,
    drill_depth: Option<usize>,
) -> Result<()> {
    check_target(spec, partition)?;
    let (svg, geometry) = render::render_feature_map(tree, partition, data, spec, drill_depth)?;
    crate::fsx::write_atomic(&out_dir.join(FEATURE_MAP_FILE), svg.as_bytes())?;
    json::write(&geometry, &out_dir.join(FEATURE_MAP_GEOMETRY_FILE))?;
    Ok(())
}

fn write_distribution_map(
    out_dir: &Path,
    tree: &GhsomTree,
    partition: &LeafPartition,
    data: &DataMatrix,
    spec: &FeatureSpec,
) -> Result<()> {
    check_target(spec, partition)?;
    let (svg, geometry) = render::render_distribution_map(tree, partition, data, spec)?;
    crate::fsx::write_atomic(&out_dir.join(DISTRIBUTION_MAP_FILE), svg.as_bytes())?;
    json::write(&geometry, &out_dir.join(DISTRIBUTION_MAP_GEOMETRY_FILE))?;
    Ok(())
}

pub fn cmd_render_feature_map(args: &RenderArgs) -> Result<()> {
    let (tree, data) = load_run(&args.out_dir).context("render-feature-map: loading the clustered run")?;
    let partition = LeafPartition::from_tree(&tree);
    let spec = args.feature.spec(&data).context("render-feature-map")?;
    write_feature_map(&args.out_dir, &tree, &partition, &data, &spec, args.drill_depth).context("render-feature-map")
}

pub fn cmd_render_distribution_map(args: &RenderArgs) -> Result<()> {
    let (tree, data) = load_run(&args.out_dir).context("render-distribution-map: loading the clustered run")?;
    let partition = LeafPartition::from_tree(&tree);
    let spec = args.feature.spec(&data).context("render-distribution-map")?;
    write_distribution_map(&args.out_dir, &tree, &partition, &data, &spec).context("render-distribution-map")
}

#[derive(Serialize)]
struct PipelineConfig<'a> {
    command: &'static str,
    first_stage: &'a Path,
    pick: &'a str,
    picked_rows: usize,
    params: ParamsDoc,
    k: usize,
    out_dir: PathBuf,
}

/// Second-stage results of [`cmd_pipeline_crispr`].
#[derive(Debug)]
pub struct Stage2 {
    /// Picked rows transposed: one sample per first-stage attribute.
    pub data: DataMatrix,
    pub tree: GhsomTree,
    pub partition: LeafPartition,
    pub out_dir: PathBuf,
}

pub fn cmd_pipeline_crispr(args: &PipelineArgs) -> Result<Stage2> {
    let (tree, data) = load_run(&args.out_dir).context("pipeline-crispr: loading the first stage")?;
    let partition = LeafPartition::from_tree(&tree);
    let members = partition.members_under(&args.pick).map_err(|_| {
        let internal: Vec<String> = tree.maps().into_iter().skip(1).map(|(p, _)| p.to_string()).collect();
        anyhow!(
            "pipeline-crispr: unknown cluster '{}'; valid leaves: {}; internal clusters: {}",
            args.pick,
            partition.names().join(", "),
            if internal.is_empty() { "none".to_string() } else { internal.join(", ") }
        )
    })?;
    let stage2 = data.select_rows(&members).without_labels().transpose();
    log::info!("second stage: {} samples x {} attributes", stage2.n_samples(), stage2.n_attributes());

    let out_dir = args.out_dir.join(STAGE2_DIR);
    let params = args.ghsom.params();
    let tree2 = train(&stage2, &params).context("pipeline-crispr: second-stage clustering")?;
    let k = args.k.unwrap_or_else(|| sai::default_k(&stage2));
    let config = PipelineConfig {
        command: "pipeline-crispr",
        first_stage: &args.out_dir,
        pick: &args.pick,
        picked_rows: members.len(),
        params: ParamsDoc::from(&params),
        k,
        out_dir: out_dir.clone(),
    };
    let partition2 = write_run(&out_dir, &tree2, &stage2, &config).context("pipeline-crispr: writing outputs")?;
    let scores = rank_attributes(&partition2, &stage2, None, Some(k)).context("pipeline-crispr: sai")?;
    table::write_scores(&scores, &out_dir.join(SAI_FILE)).context("pipeline-crispr: writing outputs")?;
    write_feature_map(&out_dir, &tree2, &partition2, &stage2, &FeatureSpec::Mean, None)
        .context("pipeline-crispr: rendering")?;
    write_distribution_map(&out_dir, &tree2, &partition2, &stage2, &FeatureSpec::Mean)
        .context("pipeline-crispr: rendering")?;
    Ok(Stage2 { data: stage2, tree: tree2, partition: partition2, out_dir })
}

/// Writes `<kind>.csv` with a trailing `label` column and returns its path.
pub fn cmd_gen_synthetic(args: &GenArgs) -> Result<PathBuf> {
    let data = match args.kind {
        SyntheticKind::Blobs => synth::gaussian_blobs(&Default::default(), args.seed),
        SyntheticKind::Hierarchy => synth::hierarchical_blobs(&Default::default(), args.seed),
        SyntheticKind::Planted => synth::planted_attributes(&Default::default(), args.seed).data,
        SyntheticKind::Blocks => synth::block_matrix(&Default::default(), args.seed).data,
    };
    let path = args.out_dir.join(format!("{}.csv", args.kind.name()));
    table::save_csv(&data, &path).context("gen-synthetic")?;
    Ok(path)
}
