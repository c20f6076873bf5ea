use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix had no rows or no columns.
    Empty,
    /// `values.len()` did not match the declared shape.
    Shape { expected: usize, found: usize },
    /// Two sample ids or two attribute names were equal.
    Duplicate { axis: &'static str, name: String },
    /// A NaN or infinite value at (row, column).
    NonFinite { row: usize, column: usize },
    /// A per-sample vector had the wrong length.
    LengthMismatch { what: &'static str, expected: usize, found: usize },
    InvalidParameter { name: &'static str, reason: String },
    TooFewSamples { needed: usize, found: usize },
    /// A row summed to zero during log-normalization.
    ZeroRowSum { sample: String },
    UnknownCluster(String),
    UnknownAttribute(String),
    /// The metric needs more clusters than the partition has.
    TooFewClusters { needed: usize, found: usize },
    /// Every sample coincides, so no dispersion ratio exists.
    DegenerateDispersion,
    /// A map kept growing past its unit budget without meeting the breadth bound.
    GrowthLimit { path: String, units: usize },
    MissingLabels,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Empty => write!(f, "matrix is empty"),
            Error::Shape { expected, found } => {
                write!(f, "expected {expected} values for the declared shape, found {found}")
            }
            Error::Duplicate { axis, name } => write!(f, "duplicate {axis} '{name}'"),
            Error::NonFinite { row, column } => {
                write!(f, "non-finite value at row {row}, column {column}")
            }
            Error::LengthMismatch { what, expected, found } => {
                write!(f, "{what}: expected length {expected}, found {found}")
            }
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::TooFewSamples { needed, found } => {
                write!(f, "need at least {needed} samples, found {found}")
            }
            Error::ZeroRowSum { sample } => {
                write!(f, "sample '{sample}' sums to zero and cannot be log-normalized")
            }
            Error::UnknownCluster(name) => write!(f, "unknown cluster '{name}'"),
            Error::UnknownAttribute(name) => write!(f, "unknown attribute '{name}'"),
            Error::TooFewClusters { needed, found } => {
                write!(f, "need at least {needed} clusters, found {found}")
            }
            Error::DegenerateDispersion => {
                write!(f, "all samples coincide; dispersion ratio undefined")
            }
            Error::GrowthLimit { path, units } => write!(
                f,
                "map '{path}' reached {units} units without meeting the breadth threshold"
            ),
            Error::MissingLabels => write!(f, "labels are required but none were supplied"),
        }
    }
}

impl core::error::Error for Error {}
