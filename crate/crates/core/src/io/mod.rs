//! Text formats and run configuration: XYZ coordinate files, writhe-matrix
//! CSV, dataset manifests, and key=value run configs.
//!
//! All numeric output uses 12 significant digits, which round-trips
//! coordinates of centered embeddings well below the 1e-10 tolerance.

mod config;
mod formats;

pub use config::{parse_bins, RunSpec};
pub use formats::{
    export_dataset, manifest_to_table, read_manifest, read_writhe_matrix, read_xyz, write_manifest,
    write_writhe_matrix, write_xyz, xyz_string, ManifestRow,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoFormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: declared {declared} rows, found {found}")]
    CountMismatch {
        path: String,
        declared: usize,
        found: usize,
    },
    #[error("{path}: matrix is not square ({rows} rows, {cols} columns at row {at})")]
    NotSquare {
        path: String,
        rows: usize,
        cols: usize,
        at: usize,
    },
    #[error("{path}: matrix asymmetric at ({i},{j}): |{a} - {b}| > 1e-6")]
    Asymmetric {
        path: String,
        i: usize,
        j: usize,
        a: f64,
        b: f64,
    },
    #[error("{path}: non-finite value at line {line}")]
    NonFinite { path: String, line: usize },
    #[error("invalid curve in {path}: {source}")]
    Curve {
        path: String,
        source: crate::geometry::GeometryError,
    },
    #[error("bad configuration: {0}")]
    Config(String),
}

/// Format with 12 significant digits.
pub(crate) fn fmt_sig12(v: f64) -> String {
    format!("{v:.11e}")
}
