//! Dense samples × attributes matrix with named axes.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major matrix of finite values. Rows are samples, columns attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    sample_ids: Vec<String>,
    attribute_names: Vec<String>,
    labels: Option<Vec<String>>,
}

fn check_unique(axis: &'static str, names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::Duplicate { axis, name: n.clone() });
        }
    }
    Ok(())
}

impl DataMatrix {
    /// Builds a matrix from row-major `values`, validating every invariant:
    /// shape, finiteness, unique ids and names, and label count.
    pub fn new(
        values: Vec<f64>,
        sample_ids: Vec<String>,
        attribute_names: Vec<String>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n_rows = sample_ids.len();
        let n_cols = attribute_names.len();
        if values.len() != n_rows * n_cols {
            return Err(Error::Shape { expected: n_rows * n_cols, found: values.len() });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / n_cols, column: pos % n_cols });
        }
        check_unique("sample id", &sample_ids)?;
        check_unique("attribute name", &attribute_names)?;
        if let Some(l) = &labels {
            if l.len() != n_rows {
                return Err(Error::LengthMismatch { what: "labels", expected: n_rows, found: l.len() });
            }
        }
        Ok(DataMatrix { values, n_rows, n_cols, sample_ids, attribute_names, labels })
    }

    /// Matrix with generated ids `s0..` and names `a0..`; handy for tests.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for r in rows {
            if r.len() != n_cols {
                return Err(Error::LengthMismatch { what: "row", expected: n_cols, found: r.len() });
            }
            values.extend_from_slice(r);
        }
        let ids = (0..rows.len()).map(|i| alloc::format!("s{i}")).collect();
        let names = (0..n_cols).map(|j| alloc::format!("a{j}")).collect();
        Self::new(values, ids, names, None)
    }

    pub fn n_samples(&self) -> usize {
        self.n_rows
    }

    pub fn n_attributes(&self) -> usize {
        self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0 || self.n_cols == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_cols.max(1)).take(self.n_rows)
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.attribute_names
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_rows {
            return Err(Error::LengthMismatch { what: "labels", expected: self.n_rows, found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    /// Swaps the sample and attribute axes. Labels are dropped because they
    /// describe the old row axis.
    pub fn transpose(&self) -> DataMatrix {
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..self.n_cols {
            for i in 0..self.n_rows {
                values.push(self.get(i, j));
            }
        }
        DataMatrix {
            values,
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            sample_ids: self.attribute_names.clone(),
            attribute_names: self.sample_ids.clone(),
            labels: None,
        }
    }

    /// Keeps the given rows in the given order (labels follow).
    pub fn select_rows(&self, rows: &[usize]) -> DataMatrix {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        DataMatrix {
            values,
            n_rows: rows.len(),
            n_cols: self.n_cols,
            sample_ids: rows.iter().map(|&i| self.sample_ids[i].clone()).collect(),
            attribute_names: self.attribute_names.clone(),
            labels: self.labels.as_ref().map(|l| rows.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// Keeps the given columns in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> DataMatrix {
        let mut values = Vec::with_capacity(self.n_rows * cols.len());
        for i in 0..self.n_rows {
            let row = self.row(i);
            values.extend(cols.iter().map(|&j| row[j]));
        }
        DataMatrix {
            values,
            n_rows: self.n_rows,
            n_cols: cols.len(),
            sample_ids: self.sample_ids.clone(),
            attribute_names: cols.iter().map(|&j| self.attribute_names[j].clone()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}
