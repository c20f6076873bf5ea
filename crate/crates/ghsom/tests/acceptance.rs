//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails or overruns its time limit.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use ghsom::cli::{self, Cli};
use ghsom::render;
use ghsom::table;
use ghsom_core::feature::FeatureSpec;
use ghsom_core::layout::{leaf_coordinates, treemap_layout};
use ghsom_core::metrics::{adjusted_rand_index, calinski_harabasz, ch_index};
use ghsom_core::sai::{identify_significant, score_attributes};
use ghsom_core::som::SomMap;
use ghsom_core::synth::{self, BlobSpec, HierarchySpec, PlantedSpec};
use ghsom_core::{run_ghsom, DataMatrix, GhsomParams, GhsomTree, LeafPartition};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn uniform(state: &mut u64) -> f64 {
    (splitmix(state) >> 11) as f64 / (1u64 << 53) as f64
}

// 1. Leaf 0x0-1x1 under a 3-row, 2-column root whose unit 0x0 holds a 2×2 map.
fn coordinates() -> Outcome {
    let mut root = SomMap::from_weights(3, 2, vec![vec![0.0]; 6], 1.0, 1);
    let mut child = SomMap::from_weights(2, 2, vec![vec![0.0]; 4], 1.0, 2);
    child.units[3].assigned = vec![0];
    root.units[0].child = Some(Box::new(child));
    let tree = GhsomTree {
        w0: vec![0.0],
        mqe0: 1.0,
        root,
        params: GhsomParams::default(),
        sample_ids: vec!["s".into()],
        attribute_names: vec!["x".into()],
    };
    let coords = leaf_coordinates(&tree);
    let leaf = coords.iter().find(|c| c.cluster == "0x0-1x1").ok_or("leaf 0x0-1x1 missing")?;
    let (ex, ey) = (leaf.px - 3.0 / 8.0, leaf.py - 3.0 / 12.0);
    ensure(ex.abs() <= 1e-15 && ey.abs() <= 1e-15, || format!("got ({}, {})", leaf.px, leaf.py))?;
    Ok(format!("({}, {}), error ({ex:e}, {ey:e})", leaf.px, leaf.py))
}

/// ARI from pair counts over all unordered sample pairs.
fn pair_count_ari(x: &[usize], y: &[usize]) -> f64 {
    let (mut a, mut b, mut c, mut d) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            match (x[i] == x[j], y[i] == y[j]) {
                (true, true) => a += 1.0,
                (true, false) => b += 1.0,
                (false, true) => c += 1.0,
                (false, false) => d += 1.0,
            }
        }
    }
    let denom = (a + b) * (b + d) + (a + c) * (c + d);
    if denom == 0.0 {
        1.0
    } else {
        2.0 * (a * d - b * c) / denom
    }
}

fn set_partitions(n: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == n {
        out.push(cur.clone());
        return;
    }
    let next = cur.iter().max().map_or(0, |m| m + 1);
    for b in 0..=next.min(parts - 1) {
        cur.push(b);
        set_partitions(n, parts, cur, out);
        cur.pop();
    }
}

// 2.
fn ari_oracle() -> Outcome {
    let mut parts = Vec::new();
    set_partitions(8, 3, &mut Vec::new(), &mut parts);
    ensure(parts.len() == 1094, || format!("{} partitions", parts.len()))?;
    let mut state = 2024;
    let labels: Vec<Vec<usize>> = (0..20).map(|_| (0..8).map(|_| (splitmix(&mut state) % 4) as usize).collect()).collect();
    let mut worst = 0f64;
    for p in &parts {
        for l in &labels {
            let got = adjusted_rand_index(p, l).map_err(|e| e.to_string())?;
            worst = worst.max((got - pair_count_ari(p, l)).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max error {worst:e}"))?;
    let part = LeafPartition::from_labels(&["A", "A", "B", "B"]);
    let checker = ghsom_core::metrics::ari(&part, &["X", "Y", "X", "Y"]).map_err(|e| e.to_string())?;
    ensure(checker == -0.5, || format!("checkerboard gave {checker}"))?;
    Ok(format!("{} comparisons, max error {worst:e}, checkerboard {checker}", parts.len() * labels.len()))
}

/// Calinski–Harabasz written out directly from centroids.
fn naive_ch(rows: &[Vec<f64>], assignment: &[usize], k: usize) -> f64 {
    let n = rows.len();
    let d = rows[0].len();
    let mut c = vec![0.0; d];
    for r in rows {
        for j in 0..d {
            c[j] += r[j] / n as f64;
        }
    }
    let (mut bgss, mut wgss) = (0.0, 0.0);
    for cluster in 0..k {
        let members: Vec<&Vec<f64>> = rows.iter().zip(assignment).filter(|(_, &a)| a == cluster).map(|(r, _)| r).collect();
        let nk = members.len() as f64;
        let ck: Vec<f64> = (0..d).map(|j| members.iter().map(|r| r[j]).sum::<f64>() / nk).collect();
        bgss += nk * (0..d).map(|j| (ck[j] - c[j]).powi(2)).sum::<f64>();
        wgss += members.iter().map(|r| (0..d).map(|j| (r[j] - ck[j]).powi(2)).sum::<f64>()).sum::<f64>();
    }
    (bgss / (k as f64 - 1.0)) / (wgss / (n as f64 - k as f64))
}

// 3.
fn ch_oracle() -> Outcome {
    let mut state = 77;
    let mut worst = 0f64;
    for _ in 0..100 {
        let k = 2 + (splitmix(&mut state) % 5) as usize;
        let d = 1 + (splitmix(&mut state) % 10) as usize;
        let n = k + 1 + (splitmix(&mut state) % (200 - k as u64)) as usize;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| 20.0 * uniform(&mut state) - 10.0).collect()).collect();
        let assignment: Vec<usize> = (0..n).map(|i| if i < k { i } else { (splitmix(&mut state) % k as u64) as usize }).collect();
        let m = DataMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let got = calinski_harabasz(&m, &assignment).map_err(|e| e.to_string())?;
        let want = naive_ch(&rows, &assignment, k);
        worst = worst.max((got - want).abs() / want.abs());
    }
    ensure(worst <= 1e-9, || format!("max relative error {worst:e}"))?;
    let m = DataMatrix::from_rows(&[vec![0.0], vec![2.0], vec![10.0], vec![12.0]]).unwrap();
    let hand = ch_index(&LeafPartition::from_labels(&["a", "a", "b", "b"]), &m).map_err(|e| e.to_string())?;
    ensure(hand == 50.0, || format!("hand case gave {hand}"))?;
    Ok(format!("100 instances, max relative error {worst:e}, hand case {hand}"))
}

// 4.
fn stopping_soundness() -> Outcome {
    let spec = HierarchySpec::default();
    let (mut violations, mut maps, mut leaves, mut deep) = (0, 0, 0, 0);
    for seed in 0..50 {
        let data = synth::hierarchical_blobs(&spec, seed);
        let tree = run_ghsom(&data, &GhsomParams { seed, ..Default::default() })
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let found = tree.audit(&data);
        for v in &found {
            eprintln!("  seed {seed}: {v:?}");
        }
        violations += found.len();
        maps += tree.maps().len();
        leaves += tree.leaves().len();
        deep += usize::from(tree.max_depth() > 1);
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("50 datasets, {maps} maps, {leaves} leaves, {deep} trees deeper than one layer, 0 violations"))
}

// 5.
fn blob_recovery() -> Outcome {
    let mut aris = Vec::new();
    for seed in 0..10 {
        let data = synth::gaussian_blobs(&BlobSpec::default(), seed);
        let tree = run_ghsom(&data, &GhsomParams { tau1: 0.1, tau2: 0.1, seed, ..Default::default() })
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let ari = ghsom_core::metrics::ari(&LeafPartition::from_tree(&tree), data.labels().unwrap())
            .map_err(|e| e.to_string())?;
        aris.push(ari);
    }
    let min = aris.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(min >= 0.95, || format!("ARIs {aris:?}"))?;
    Ok(format!("min ARI {min} over 10 seeds"))
}

/// (sigma_i, sigma_b) for `cluster` and attribute column `g` by direct summation.
fn direct_sigma(data: &DataMatrix, labels: &[String], cluster: &str, g: usize) -> (f64, f64) {
    let mut sums: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        let e = sums.entry(l).or_default();
        e.0 += data.get(i, g);
        e.1 += 1.0;
    }
    let mean = |l: &str| sums[l].0 / sums[l].1;
    let mc = mean(cluster);
    let ss: f64 = labels.iter().enumerate().filter(|(_, l)| *l == cluster).map(|(i, _)| (data.get(i, g) - mc).powi(2)).sum();
    let sigma_i = (ss / sums[cluster].1).sqrt();
    let between: f64 = sums.keys().filter(|&&l| l != cluster).map(|l| (mean(l) - mc).powi(2)).sum();
    (sigma_i, (between / (sums.len() as f64 - 1.0)).sqrt())
}

// 6.
fn sai_recovery() -> Outcome {
    let mut worst = 0f64;
    let mut lowest_rank = 0;
    for seed in 0..10 {
        let planted = synth::planted_attributes(&PlantedSpec::default(), seed);
        let data = &planted.data;
        let labels = data.labels().unwrap();
        let part = LeafPartition::from_labels(labels);
        let top = identify_significant(&part, data, &planted.target, 10).map_err(|e| e.to_string())?;
        for name in &planted.planted {
            let rank = top
                .iter()
                .find(|s| &s.attribute == name)
                .map(|s| s.rank)
                .ok_or_else(|| format!("seed {seed}: {name} not in the top 10"))?;
            lowest_rank = lowest_rank.max(rank);
        }
        for cluster in part.names() {
            for s in score_attributes(&part, data, cluster).map_err(|e| e.to_string())? {
                let g = data.attribute_index(&s.attribute).unwrap();
                let (si, sb) = direct_sigma(data, labels, cluster, g);
                worst = worst.max((s.sigma_i - si).abs()).max((s.sigma_b - sb).abs()).max((s.diff - (sb - si)).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("planted attributes ranked at worst {lowest_rank}, max oracle error {worst:e}"))
}

// 7.
fn sweep_monotonicity() -> Outcome {
    let data = synth::hierarchical_blobs(&HierarchySpec::default(), 0);
    let base = GhsomParams::default();
    let ladder = [0.2, 0.1, 0.05];
    let grid = ghsom_core::sweep::sweep::<String>(&data, &base, &ladder, &ladder, None).map_err(|e| e.to_string())?;
    let trees: Vec<Vec<GhsomTree>> = ladder
        .iter()
        .map(|&t1| ladder.iter().map(|&t2| run_ghsom(&data, &GhsomParams { tau1: t1, tau2: t2, ..base.clone() })).collect())
        .map(|row: Vec<_>| row.into_iter().collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let at = |i: usize, j: usize| grid.cell(i, j).outcome.as_ref().map_err(|e| e.to_string());
    let j_default = 1; // tau2 = 0.1
    let i_default = 1; // tau1 = 0.1
    let units: Vec<usize> = (0..3).map(|i| at(i, j_default).map(|s| s.unit_count)).collect::<Result<_, _>>()?;
    let depths: Vec<usize> = (0..3).map(|j| at(i_default, j).map(|s| s.depth)).collect::<Result<_, _>>()?;
    let mut detail = String::new();
    for (i, row) in trees.iter().enumerate() {
        let u: Vec<usize> = row.iter().map(GhsomTree::unit_count).collect();
        let r: Vec<usize> = row.iter().map(|t| t.root.units.len()).collect();
        let d: Vec<usize> = row.iter().map(GhsomTree::max_depth).collect();
        detail.push_str(&format!("\n    tau1={}: units {u:?} root units {r:?} depth {d:?}", ladder[i]));
    }
    let root_units: Vec<Vec<usize>> = trees.iter().map(|row| row.iter().map(|t| t.root.units.len()).collect()).collect();
    let root_monotone = (0..3).all(|j| (0..2).all(|i| root_units[i][j] <= root_units[i + 1][j]));
    let depth_monotone_all = trees.iter().all(|row| row.windows(2).all(|w| w[0].max_depth() <= w[1].max_depth()));
    ensure(units.windows(2).all(|w| w[0] <= w[1]), || format!("units {units:?} at tau2=0.1{detail}"))?;
    ensure(depths.windows(2).all(|w| w[0] <= w[1]), || format!("depths {depths:?} at tau1=0.1{detail}"))?;
    ensure(root_monotone && depth_monotone_all, || format!("grid{detail}"))?;
    Ok(format!(
        "units {units:?} over tau1 at tau2=0.1, depth {depths:?} over tau2 at tau1=0.1; root units and depth monotone over the full grid{detail}"
    ))
}

// 8.
fn rendering() -> Outcome {
    let data = synth::hierarchical_blobs(&HierarchySpec::default(), 2);
    let tree = run_ghsom(&data, &GhsomParams { tau2: 0.05, seed: 2, ..Default::default() }).map_err(|e| e.to_string())?;
    let part = LeafPartition::from_tree(&tree);
    let (fm_svg, fm) = render::render_feature_map(&tree, &part, &data, &FeatureSpec::Mean, None).map_err(|e| e.to_string())?;
    let nodes = treemap_layout(&tree, render::FEATURE_MAP_AREA, None);
    ensure(nodes.len() == fm.rects.len(), || "sidecar and layout disagree".into())?;
    let canvas = render::FEATURE_MAP_AREA.area();
    let n = data.n_samples() as f64;
    let (mut worst_sum, mut worst_prop) = (0f64, 0f64);
    for (i, node) in nodes.iter().enumerate() {
        let r = &fm.rects[i];
        ensure(r.name == node.name && r.width * r.height == node.rect.area(), || format!("sidecar differs at {}", node.name))?;
        let children: f64 = nodes.iter().filter(|c| c.parent == Some(i)).map(|c| c.rect.area()).sum();
        if children > 0.0 {
            worst_sum = worst_sum.max((children - node.rect.area()).abs() / node.rect.area());
        }
        let want = canvas * node.members.len() as f64 / n;
        worst_prop = worst_prop.max((node.rect.area() - want).abs() / want);
    }
    let top: f64 = nodes.iter().filter(|c| c.parent.is_none()).map(|c| c.rect.area()).sum();
    worst_sum = worst_sum.max((top - canvas).abs() / canvas);
    ensure(worst_sum <= 1e-6, || format!("child areas off by {worst_sum:e}"))?;
    ensure(worst_prop <= 0.005, || format!("area/count off by {worst_prop:e}"))?;

    let (dm_svg, dm) = render::render_distribution_map(&tree, &part, &data, &FeatureSpec::LabelMajority).map_err(|e| e.to_string())?;
    let labels = data.labels().unwrap();
    for c in &dm.circles {
        let members = part.members(part.cluster_index(&c.cluster).unwrap());
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for &i in members {
            *counts.entry(labels[i].as_str()).or_default() += 1;
        }
        let purity = *counts.values().max().unwrap() as f64 / members.len() as f64;
        ensure(c.paint.opacity == purity, || format!("{}: opacity {} purity {purity}", c.cluster, c.paint.opacity))?;
        ensure(dm_svg.contains(&format!("fill-opacity=\"{purity}\"")), || format!("{}: svg opacity", c.cluster))?;
    }
    let again = (
        render::render_feature_map(&tree, &part, &data, &FeatureSpec::Mean, None).unwrap().0,
        render::render_distribution_map(&tree, &part, &data, &FeatureSpec::LabelMajority).unwrap().0,
    );
    ensure(again.0 == fm_svg && again.1 == dm_svg, || "renders differ".into())?;
    Ok(format!(
        "{} rects (child sums off by at most {worst_sum:e}, area/count by {worst_prop:e}), {} bubbles with opacity = purity, renders identical",
        nodes.len(),
        dm.circles.len()
    ))
}

// 9.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("hierarchy.csv");
    table::save_csv(&synth::hierarchical_blobs(&HierarchySpec::default(), 5), &input).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["first", "second"] {
        let out = dir.path().join(run);
        let cli = Cli::try_parse_from([
            "ghsom", "cluster", "--input", input.to_str().unwrap(), "--labels-column", "label", "--seed", "5", "--out-dir",
            out.to_str().unwrap(),
        ])
        .map_err(|e| e.to_string())?;
        cli::run(cli).map_err(|e| format!("{e:#}"))?;
        let read = |f: &str| fs::read(out.join(f)).map_err(|e| e.to_string());
        outputs.push((read(cli::TREE_FILE)?, read(cli::PARTITION_FILE)?));
    }
    ensure(outputs[0].0 == outputs[1].0, || "tree.json differs".into())?;
    ensure(outputs[0].1 == outputs[1].1, || "partition.csv differs".into())?;
    Ok(format!("tree.json ({} bytes) and partition.csv ({} bytes) identical", outputs[0].0.len(), outputs[0].1.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("coordinate oracle", Duration::from_secs(1), coordinates),
        ("ARI exhaustive oracle", Duration::from_secs(30), ari_oracle),
        ("CH oracle", Duration::from_secs(10), ch_oracle),
        ("GHSOM stopping soundness", Duration::from_secs(120), stopping_soundness),
        ("blob recovery", Duration::from_secs(60), blob_recovery),
        ("SAI planted recovery", Duration::from_secs(30), sai_recovery),
        ("sweep monotonicity", Duration::from_secs(120), sweep_monotonicity),
        ("rendering contracts", Duration::from_secs(10), rendering),
        ("end-to-end determinism", Duration::from_secs(60), determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("over the {limit:?} limit; {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {} {name} [{took:.2?}]: {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    } else {
        println!("all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    }
}
