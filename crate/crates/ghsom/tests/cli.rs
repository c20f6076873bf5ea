use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use ghsom::cli::{self, Cli};
use ghsom::{json, table};
use ghsom_core::synth::{self, BlobSpec, BlockSpec, HierarchySpec};
use ghsom_core::{metrics, DataMatrix, LeafPartition};
use tempfile::TempDir;

fn ghsom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghsom")).args(args).env("RUST_LOG", "error").output().unwrap()
}

fn run_ok(args: &[&str]) {
    let out = ghsom(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_input(dir: &Path, name: &str, data: &DataMatrix) -> String {
    let path = dir.join(name);
    table::save_csv(data, &path).unwrap();
    path.to_str().unwrap().to_string()
}

fn write_unlabelled(dir: &Path, name: &str, data: DataMatrix) -> String {
    write_input(dir, name, &data.without_labels())
}

fn fast(args: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    v.extend(["--lambda".into(), "30".into()]);
    v
}

fn parse(args: &[String]) -> Cli {
    Cli::try_parse_from(std::iter::once("ghsom".to_string()).chain(args.iter().cloned())).unwrap()
}

fn run_lib(args: &[String]) {
    cli::run(parse(args)).unwrap();
}

#[test]
fn cluster_covers_every_row_of_blobs() {
    let dir = TempDir::new().unwrap();
    let input = write_input(dir.path(), "blobs.csv", &synth::gaussian_blobs(&BlobSpec::default(), 0));
    let out = dir.path().join("run");
    run_ok(&["cluster", "--input", &input, "--labels-column", "label", "--out-dir", p(&out)]);
    for f in ["tree.json", "partition.csv", "data.csv", "config.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let rows = table::read_partition(&out.join("partition.csv")).unwrap();
    assert_eq!(rows.len(), 200);
    let leaves: BTreeSet<_> = rows.iter().map(|(_, l)| l.clone()).collect();
    assert!(leaves.len() >= 4);
    let tree = json::read_tree(&out.join("tree.json")).unwrap();
    let names: BTreeSet<_> = tree.leaves().iter().filter(|l| !l.unit.assigned.is_empty()).map(|l| l.path().to_string()).collect();
    assert_eq!(names, leaves);
}

#[test]
fn loosest_thresholds_give_one_layer() {
    let dir = TempDir::new().unwrap();
    let mut state = 0x9e3779b97f4a7c15u64;
    let rows: Vec<Vec<f64>> = (0..60)
        .map(|_| {
            (0..3)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 11) as f64 / (1u64 << 53) as f64
                })
                .collect()
        })
        .collect();
    let input = write_input(dir.path(), "uniform.csv", &DataMatrix::from_rows(&rows).unwrap());
    let out = dir.path().join("run");
    run_ok(&["cluster", "--input", &input, "--tau1", "1.0", "--tau2", "1.0", "--out-dir", p(&out)]);
    let tree = json::read_tree(&out.join("tree.json")).unwrap();
    assert_eq!(tree.max_depth(), 1);
}

#[test]
fn missing_input_names_the_path() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nowhere.csv");
    let out = ghsom(&["cluster", "--input", p(&missing), "--out-dir", p(dir.path())]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(p(&missing)), "{stderr}");
    assert!(stderr.contains("cluster"));
}

#[test]
fn malformed_input_names_row_and_column() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "id,a,b\nx,1,2\ny,3,oops\n").unwrap();
    let out = ghsom(&["cluster", "--input", p(&input), "--out-dir", p(dir.path())]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("row 3, column b"), "{stderr}");
}

#[test]
fn commands_compose_through_files() {
    let dir = TempDir::new().unwrap();
    let planted = synth::planted_attributes(&Default::default(), 0);
    let input = write_input(dir.path(), "planted.csv", &planted.data);
    let out = dir.path().join("run");
    let o = p(&out);
    // 50 noise attributes never meet a tight breadth bound
    run_ok(&["cluster", "--input", &input, "--labels-column", "label", "--tau1", "1.0", "--tau2", "1.0", "--out-dir", o]);
    let tree = json::read_tree(&out.join("tree.json")).unwrap();
    let part = LeafPartition::from_tree(&tree);
    let leaf = part.names()[0].clone();

    run_ok(&["sai", "--out-dir", o, "--cluster", &leaf]);
    let text = fs::read_to_string(out.join("sai.csv")).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(text.starts_with("cluster,rank,attribute,sigma_i,sigma_b,diff\n"));

    run_ok(&["sai", "--out-dir", o, "--cluster", &leaf, "--k", "53"]);
    let attrs: BTreeSet<String> = fs::read_to_string(out.join("sai.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().to_string())
        .collect();
    assert_eq!(attrs.len(), 53);

    let too_many = ghsom(&["sai", "--out-dir", o, "--cluster", &leaf, "--k", "54"]);
    assert!(!too_many.status.success());

    let unknown = ghsom(&["sai", "--out-dir", o, "--cluster", "7x7"]);
    assert!(!unknown.status.success());
    let stderr = String::from_utf8_lossy(&unknown.stderr);
    for name in part.names() {
        assert!(stderr.contains(name.as_str()), "{stderr}");
    }

    run_ok(&["render-feature-map", "--out-dir", o, "--feature", "difference", "--target-cluster", &leaf]);
    run_ok(&["render-distribution-map", "--out-dir", o, "--feature", "attribute", "--attribute", &planted.planted[0]]);
    for f in ["feature_map.svg", "feature_map.json", "distribution_map.svg", "distribution_map.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let bad = ghsom(&["render-feature-map", "--out-dir", o, "--feature", "attribute", "--attribute", "nope"]);
    assert!(!bad.status.success());
    let bad = ghsom(&["render-feature-map", "--out-dir", o, "--feature", "attribute"]);
    assert!(!bad.status.success());
}

#[test]
fn commands_need_a_clustered_run() {
    let dir = TempDir::new().unwrap();
    let out = ghsom(&["sai", "--out-dir", p(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("tree.json"));
}

#[test]
fn cluster_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let input = write_input(dir.path(), "h.csv", &synth::hierarchical_blobs(&HierarchySpec::default(), 3));
    let files = ["tree.json", "partition.csv", "data.csv", "feature_map.svg", "feature_map.json", "distribution_map.svg"];
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        run_lib(&fast(&["cluster", "--input", &input, "--labels-column", "label", "--seed", "3", "--out-dir", p(&out)]));
        run_lib(&["render-feature-map".into(), "--out-dir".into(), p(&out).into(), "--feature".into(), "label".into()]);
        run_lib(&["render-distribution-map".into(), "--out-dir".into(), p(&out).into(), "--feature".into(), "median".into()]);
        outputs.push(files.map(|f| fs::read(out.join(f)).unwrap()));
    }
    for (i, f) in files.iter().enumerate() {
        assert_eq!(outputs[0][i], outputs[1][i], "{f} differs");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    let input = write_unlabelled(dir.path(), "h.csv", synth::hierarchical_blobs(&HierarchySpec::default(), 1));
    let mut trees = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(threads);
        run_lib(&fast(&["--threads", threads, "cluster", "--input", &input, "--out-dir", p(&out)]));
        trees.push(fs::read(out.join("tree.json")).unwrap());
    }
    assert_eq!(trees[0], trees[1]);
}

#[test]
fn flags_fall_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let input = write_unlabelled(dir.path(), "b.csv", synth::gaussian_blobs(&BlobSpec { n_samples: 40, ..Default::default() }, 0));
    let out = dir.path().join("run");
    let status = Command::new(env!("CARGO_BIN_EXE_ghsom"))
        .args(["cluster", "--input", &input])
        .env("GHSOM_OUT_DIR", &out)
        .env("GHSOM_TAU1", "0.5")
        .env("GHSOM_SEED", "9")
        .status()
        .unwrap();
    assert!(status.success());
    let config: serde_json::Value = serde_json::from_slice(&fs::read(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(config["params"]["tau1"], 0.5);
    assert_eq!(config["params"]["seed"], 9);
    assert_eq!(config["params"]["tau2"], 0.1);
    assert_eq!(config["zscore"], false);
}

#[test]
fn sweep_writes_grid_and_best_cells() {
    let dir = TempDir::new().unwrap();
    let input = write_input(dir.path(), "b.csv", &synth::gaussian_blobs(&BlobSpec::default(), 1));
    let out = dir.path().join("sweep");
    run_ok(&[
        "sweep", "--input", &input, "--labels-column", "label", "--tau1-list", "0.3,0.1", "--tau2-list", "0.3,0.1",
        "--lambda", "30", "--out-dir", p(&out),
    ]);
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let best: serde_json::Value = serde_json::from_slice(&fs::read(out.join("sweep_best.json")).unwrap()).unwrap();
    assert!(best["best_ari"]["ari"].as_f64().unwrap() >= 0.95);
    assert_eq!(best["succeeded"], 4);
    assert!(out.join("sweep_config.json").exists());
}

#[test]
fn sweep_fails_only_when_every_cell_fails() {
    let dir = TempDir::new().unwrap();
    let input = write_unlabelled(dir.path(), "p.csv", synth::planted_attributes(&Default::default(), 0).data);
    let out = dir.path().join("sweep");
    let args = |t1: &str| {
        ghsom(&["sweep", "--input", &input, "--tau1-list", t1, "--tau2-list", "1.0", "--lambda", "2", "--out-dir", p(&out)])
    };
    assert!(args("1.0,0.05").status.success());
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(csv.lines().nth(2).unwrap().contains("breadth threshold"), "{csv}");
    assert!(!args("0.05").status.success());
}

#[test]
fn preprocessing_flags_are_applied() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("counts.csv");
    fs::write(&input, "id,g1,g2,g3,g4\na,1,2,3,1\nb,4,0,1,2\nc,2,2,2,0\nd,0,5,1,3\ne,3,3,0,1\n").unwrap();
    let out = dir.path().join("run");
    run_ok(&[
        "cluster", "--input", p(&input), "--log-normalize", "--top-k-variable", "2", "--zscore", "--tau1", "1.0",
        "--out-dir", p(&out),
    ]);
    let data = table::load_csv(&out.join("data.csv"), None).unwrap();
    assert_eq!(data.n_attributes(), 2);
    for j in 0..2 {
        let mean: f64 = data.column(j).iter().sum::<f64>() / 5.0;
        assert!(mean.abs() < 1e-12);
    }
    let out_t = dir.path().join("run_t");
    run_ok(&["cluster", "--input", p(&input), "--transpose", "--tau1", "1.0", "--out-dir", p(&out_t)]);
    let data = table::load_csv(&out_t.join("data.csv"), None).unwrap();
    assert_eq!(data.sample_ids(), ["g1", "g2", "g3", "g4"]);
}

#[test]
fn pipeline_second_stage_separates_cell_blocks() {
    let dir = TempDir::new().unwrap();
    let blocks = synth::block_matrix(&BlockSpec::default(), 0);
    let input = write_input(dir.path(), "blocks.csv", &blocks.data);
    let out = dir.path().join("run");
    run_lib(&fast(&["cluster", "--input", &input, "--labels-column", "label", "--out-dir", p(&out)]));
    let tree = json::read_tree(&out.join("tree.json")).unwrap();
    let part = LeafPartition::from_tree(&tree);
    let pick = part.names()[0].clone();
    let m = part.members(0).len();

    let args = cli::PipelineArgs {
        out_dir: out.clone(),
        pick: pick.clone(),
        ghsom: match parse(&fast(&["cluster", "--input", "x", "--out-dir", "y"])).command {
            cli::Command::Cluster(c) => c.ghsom,
            _ => unreachable!(),
        },
        k: None,
    };
    let stage2 = cli::cmd_pipeline_crispr(&args).unwrap();
    let a = blocks.data.n_attributes();
    assert_eq!((stage2.data.n_samples(), stage2.data.n_attributes()), (a, m));
    assert_eq!(stage2.data.sample_ids(), blocks.data.attribute_names());

    // every second-stage leaf holds cells of one block, and each block is found
    let mut groups_per_leaf: BTreeMap<usize, BTreeSet<&str>> = BTreeMap::new();
    for (cell, &leaf) in stage2.partition.assignment().iter().enumerate() {
        groups_per_leaf.entry(leaf).or_default().insert(blocks.cell_groups[cell].as_str());
    }
    assert!(groups_per_leaf.values().all(|g| g.len() == 1), "{groups_per_leaf:?}");
    let found: BTreeSet<_> = groups_per_leaf.values().flatten().collect();
    assert_eq!(found.len(), BlockSpec::default().cell_groups);
    let ari = metrics::ari(&stage2.partition, &blocks.cell_groups).unwrap();
    assert!(ari > 0.5, "{ari}");

    for f in ["tree.json", "partition.csv", "data.csv", "sai.csv", "feature_map.svg", "distribution_map.svg"] {
        assert!(stage2.out_dir.join(f).exists(), "{f}");
    }
    let bad = ghsom(&["pipeline-crispr", "--out-dir", p(&out), "--pick", "9x9"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains(&pick));
}

#[test]
fn pipeline_pick_of_an_internal_cluster_takes_all_descendants() {
    let dir = TempDir::new().unwrap();
    let input = write_unlabelled(dir.path(), "h.csv", synth::hierarchical_blobs(&HierarchySpec::default(), 0));
    let out = dir.path().join("run");
    run_lib(&fast(&["cluster", "--input", &input, "--out-dir", p(&out)]));
    let tree = json::read_tree(&out.join("tree.json")).unwrap();
    let (internal, _) = tree.maps().into_iter().nth(1).expect("a child map");
    let internal = internal.to_string();
    let part = LeafPartition::from_tree(&tree);
    let expected: usize = part
        .names()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.starts_with(&format!("{internal}-")))
        .map(|(i, _)| part.members(i).len())
        .sum();
    run_ok(&["pipeline-crispr", "--out-dir", p(&out), "--pick", &internal, "--tau1", "0.5", "--tau2", "0.5", "--lambda", "20"]);
    let data = table::load_csv(&out.join("stage2").join("data.csv"), None).unwrap();
    assert_eq!(data.n_attributes(), expected);
    assert_eq!(data.n_samples(), 6);
}

#[test]
fn distribution_sidecar_opacity_is_measured_purity() {
    let dir = TempDir::new().unwrap();
    let data = synth::hierarchical_blobs(&HierarchySpec::default(), 4);
    let input = write_input(dir.path(), "h.csv", &data);
    let out = dir.path().join("run");
    run_lib(&fast(&["cluster", "--input", &input, "--labels-column", "label", "--tau1", "0.3", "--out-dir", p(&out)]));
    run_ok(&["render-distribution-map", "--out-dir", p(&out), "--feature", "label"]);
    let geo: serde_json::Value = serde_json::from_slice(&fs::read(out.join("distribution_map.json")).unwrap()).unwrap();
    let labels = data.labels().unwrap();
    let rows = table::read_partition(&out.join("partition.csv")).unwrap();
    let mut by_leaf: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for (i, (_, leaf)) in rows.iter().enumerate() {
        *by_leaf.entry(leaf).or_default().entry(labels[i].as_str()).or_default() += 1;
    }
    let circles = geo["circles"].as_array().unwrap();
    assert_eq!(circles.len(), by_leaf.len());
    for c in circles {
        let counts = &by_leaf[c["cluster"].as_str().unwrap()];
        let total: usize = counts.values().sum();
        let purity = *counts.values().max().unwrap() as f64 / total as f64;
        assert_eq!(c["opacity"].as_f64().unwrap(), purity);
        assert_eq!(c["purity"].as_f64().unwrap(), purity);
    }
}

#[test]
fn gen_synthetic_writes_loadable_files() {
    let dir = TempDir::new().unwrap();
    for kind in ["blobs", "hierarchy", "planted", "blocks"] {
        run_ok(&["gen-synthetic", "--kind", kind, "--seed", "2", "--out-dir", p(dir.path())]);
        let m = table::load_csv(&dir.path().join(format!("{kind}.csv")), Some("label")).unwrap();
        assert!(m.n_samples() > 0 && m.labels().is_some());
    }
}
