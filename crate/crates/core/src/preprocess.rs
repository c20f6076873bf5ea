//! Expression-matrix preprocessing.
//!
//! Steps run in a fixed order regardless of how the spec was built:
//! transpose, log-normalize, top-k variable attribute selection, z-score.
//! Every step is opt-in.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::stats;

pub const DEFAULT_SCALE_FACTOR: f64 = 10_000.0;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PreprocessSpec {
    pub transpose: bool,
    /// `Some(scale)` divides each row by its sum, multiplies by `scale` and
    /// takes `ln(1 + x)`.
    pub log_normalize: Option<f64>,
    /// Keep the `k` highest-variance attributes (variance after normalization).
    pub top_k_variable: Option<usize>,
    pub zscore_scale: bool,
}

pub fn preprocess(m: &DataMatrix, spec: &PreprocessSpec) -> Result<DataMatrix> {
    let mut out = if spec.transpose { m.transpose() } else { m.clone() };
    if let Some(scale) = spec.log_normalize {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter {
                name: "log_normalize scale factor",
                reason: format!("must be a positive finite number, got {scale}"),
            });
        }
        out = log_normalize(&out, scale)?;
    }
    if let Some(k) = spec.top_k_variable {
        out = top_k_variable(&out, k)?;
    }
    if spec.zscore_scale {
        out = zscore(&out);
    }
    Ok(out)
}

/// Per row: `ln(1 + scale * x / row_sum)`.
pub fn log_normalize(m: &DataMatrix, scale: f64) -> Result<DataMatrix> {
    let mut out = m.clone();
    let n_cols = m.n_attributes();
    for (i, row) in out.values_mut().chunks_exact_mut(n_cols.max(1)).enumerate() {
        let sum: f64 = row.iter().sum();
        if sum == 0.0 {
            return Err(Error::ZeroRowSum { sample: m.sample_ids()[i].clone() });
        }
        for v in row.iter_mut() {
            *v = libm::log1p(*v / sum * scale);
        }
    }
    Ok(out)
}

/// Keeps the `k` attributes with the largest population variance, in their
/// original column order. Equal variances favour the earlier column.
pub fn top_k_variable(m: &DataMatrix, k: usize) -> Result<DataMatrix> {
    if k == 0 || k > m.n_attributes() {
        return Err(Error::InvalidParameter {
            name: "top_k_variable",
            reason: format!("must be in 1..={}, got {k}", m.n_attributes()),
        });
    }
    let variances: Vec<f64> =
        (0..m.n_attributes()).map(|j| stats::population_variance(&m.column(j))).collect();
    let mut order: Vec<usize> = (0..m.n_attributes()).collect();
    order.sort_by(|&a, &b| variances[b].total_cmp(&variances[a]).then(a.cmp(&b)));
    let mut keep = order[..k].to_vec();
    keep.sort_unstable();
    Ok(m.select_columns(&keep))
}

/// Per attribute: subtract the mean, divide by the population standard
/// deviation. Constant attributes become all-zero.
pub fn zscore(m: &DataMatrix) -> DataMatrix {
    let mut out = m.clone();
    let n_cols = m.n_attributes();
    for j in 0..n_cols {
        let col = m.column(j);
        let constant = col.iter().all(|&v| v == col[0]);
        let mean = stats::mean(col.iter().copied());
        let sd = stats::sqrt(stats::population_variance(&col));
        for (i, v) in col.iter().enumerate() {
            out.values_mut()[i * n_cols + j] = if constant || sd == 0.0 { 0.0 } else { (v - mean) / sd };
        }
    }
    out
}
