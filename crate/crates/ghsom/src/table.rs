//! CSV formats: matrices, partitions, attribute scores and sweep grids.
//!
//! Matrices have a header row and the sample id in the first column. Reals
//! are written with Rust's shortest round-trip formatting, so a saved matrix
//! loads back bit-for-bit.

use std::fs::File;
use std::io;
use std::path::Path;

use ghsom_core::sai::AttributeScore;
use ghsom_core::sweep::SweepGrid;
use ghsom_core::{DataMatrix, LeafPartition};

use crate::error::{FormatError, Result};
use crate::fsx;

/// Header of the id column in files this crate writes.
pub const ID_HEADER: &str = "id";
/// Header of the label column in files this crate writes.
pub const LABEL_HEADER: &str = "label";

pub fn load_csv(path: &Path, label_column: Option<&str>) -> Result<DataMatrix> {
    let file = File::open(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })?;
    read_csv(file, path, label_column)
}

/// Parses a matrix from `reader`; `origin` is only used in error messages.
/// Row numbers in errors are file lines, so the first data row is row 2.
pub fn read_csv<R: io::Read>(reader: R, origin: &Path, label_column: Option<&str>) -> Result<DataMatrix> {
    let csv_err = |source| FormatError::Csv { path: origin.to_path_buf(), source };
    let invalid = |reason: String| FormatError::Invalid { path: origin.to_path_buf(), reason };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let label_idx = match label_column {
        Some(name) => Some(
            headers
                .iter()
                .skip(1)
                .position(|h| h == name)
                .map(|p| p + 1)
                .ok_or_else(|| invalid(format!("no column named '{name}'")))?,
        ),
        None => None,
    };
    let attr_cols: Vec<usize> = (1..headers.len()).filter(|&j| Some(j) != label_idx).collect();
    if attr_cols.is_empty() {
        return Err(invalid("need an id column and at least one attribute column".into()));
    }
    let names: Vec<String> = attr_cols.iter().map(|&j| headers[j].to_string()).collect();

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i + 2;
        ids.push(record[0].to_string());
        if let Some(l) = label_idx {
            labels.push(record[l].to_string());
        }
        for &j in &attr_cols {
            let cell = &record[j];
            let v: f64 = cell.parse().map_err(|_| FormatError::Parse {
                path: origin.to_path_buf(),
                row,
                column: headers[j].to_string(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(FormatError::NonFinite {
                    path: origin.to_path_buf(),
                    row,
                    column: headers[j].to_string(),
                    value: cell.to_string(),
                });
            }
            values.push(v);
        }
    }
    let labels = label_idx.map(|_| labels);
    DataMatrix::new(values, ids, names, labels).map_err(|source| FormatError::Data { path: origin.to_path_buf(), source })
}

fn finish(path: &Path, wtr: csv::Writer<Vec<u8>>) -> Result<()> {
    let bytes = wtr
        .into_inner()
        .map_err(|e| FormatError::Io { path: path.to_path_buf(), source: e.into_error() })?;
    fsx::write_atomic(path, &bytes)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

/// Writes `m` in the format [`load_csv`] reads, with labels (when present)
/// in a trailing `label` column.
pub fn save_csv(m: &DataMatrix, path: &Path) -> Result<()> {
    let bytes = matrix_bytes(m);
    fsx::write_atomic(path, &bytes)
}

pub fn matrix_bytes(m: &DataMatrix) -> Vec<u8> {
    let mut wtr = writer();
    let mut header = vec![ID_HEADER.to_string()];
    header.extend(m.attribute_names().iter().cloned());
    if m.labels().is_some() {
        header.push(LABEL_HEADER.to_string());
    }
    wtr.write_record(&header).expect("in-memory write");
    for (i, row) in m.rows().enumerate() {
        let mut rec = vec![m.sample_ids()[i].clone()];
        rec.extend(row.iter().map(|v| v.to_string()));
        if let Some(l) = m.labels() {
            rec.push(l[i].clone());
        }
        wtr.write_record(&rec).expect("in-memory write");
    }
    wtr.into_inner().expect("in-memory flush")
}

/// `sample_id,leaf` for every sample, in matrix order.
pub fn write_partition(partition: &LeafPartition, sample_ids: &[String], path: &Path) -> Result<()> {
    let mut wtr = writer();
    let csv_err = |source| FormatError::Csv { path: path.to_path_buf(), source };
    wtr.write_record(["sample_id", "leaf"]).map_err(csv_err)?;
    for (i, id) in sample_ids.iter().enumerate() {
        wtr.write_record([id.as_str(), partition.label_of(i)]).map_err(csv_err)?;
    }
    finish(path, wtr)
}

/// Reads `sample_id,leaf` pairs.
pub fn read_partition(path: &Path) -> Result<Vec<(String, String)>> {
    let csv_err = |source| FormatError::Csv { path: path.to_path_buf(), source };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 2 {
            return Err(FormatError::Invalid { path: path.to_path_buf(), reason: "expected sample_id,leaf".into() });
        }
        out.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(out)
}

pub fn write_scores(scores: &[AttributeScore], path: &Path) -> Result<()> {
    let mut wtr = writer();
    let csv_err = |source| FormatError::Csv { path: path.to_path_buf(), source };
    wtr.write_record(["cluster", "rank", "attribute", "sigma_i", "sigma_b", "diff"]).map_err(csv_err)?;
    for s in scores {
        wtr.write_record([
            s.cluster.clone(),
            s.rank.to_string(),
            s.attribute.clone(),
            s.sigma_i.to_string(),
            s.sigma_b.to_string(),
            s.diff.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(path, wtr)
}

/// One row per cell. Failed cells leave the score columns empty and carry
/// the message in `error`. An infinite CH is written as `inf`.
pub fn write_sweep(grid: &SweepGrid, path: &Path) -> Result<()> {
    let mut wtr = writer();
    let csv_err = |source| FormatError::Csv { path: path.to_path_buf(), source };
    wtr.write_record(["tau1", "tau2", "ch", "ari", "leaf_count", "depth", "unit_count", "error"])
        .map_err(csv_err)?;
    for c in &grid.cells {
        let mut rec = vec![c.tau1.to_string(), c.tau2.to_string()];
        match &c.outcome {
            Ok(s) => rec.extend([
                s.ch.to_string(),
                s.ari.map(|a| a.to_string()).unwrap_or_default(),
                s.leaf_count.to_string(),
                s.depth.to_string(),
                s.unit_count.to_string(),
                String::new(),
            ]),
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 5));
                rec.push(e.to_string());
            }
        }
        wtr.write_record(&rec).map_err(csv_err)?;
    }
    finish(path, wtr)
}
