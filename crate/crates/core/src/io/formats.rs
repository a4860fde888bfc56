//! XYZ coordinate files, writhe-matrix CSV, and dataset manifests.

use super::{fmt_sig12, IoFormatError};
use crate::geometry::{FunctionalVector, PolygonalCurve, WritheMatrix};
use crate::probe::LabeledFeatureTable;
use crate::sampler::Dataset;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

fn pstr(path: &Path) -> String {
    path.display().to_string()
}

/// XYZ text body: line 1 = N, lines 2..N+1 = "x y z".
pub fn xyz_string(curve: &PolygonalCurve) -> String {
    let mut out = String::with_capacity(curve.len() * 48 + 8);
    let _ = writeln!(out, "{}", curve.len());
    for v in curve.vertices() {
        let _ = writeln!(
            out,
            "{} {} {}",
            fmt_sig12(v[0]),
            fmt_sig12(v[1]),
            fmt_sig12(v[2])
        );
    }
    out
}

pub fn write_xyz(path: &Path, curve: &PolygonalCurve) -> Result<(), IoFormatError> {
    fs::write(path, xyz_string(curve))?;
    Ok(())
}

fn parse_xyz_text(text: &str, path: &Path) -> Result<PolygonalCurve, IoFormatError> {
    let mut lines = text.lines();
    let first = lines.next().ok_or_else(|| IoFormatError::Parse {
        path: pstr(path),
        line: 1,
        msg: "empty file".into(),
    })?;
    let n: usize = first.trim().parse().map_err(|e| IoFormatError::Parse {
        path: pstr(path),
        line: 1,
        msg: format!("bad vertex count: {e}"),
    })?;
    let mut vertices = Vec::with_capacity(n);
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut coords = [0.0f64; 3];
        let mut parts = line.split_whitespace();
        for c in &mut coords {
            *c = parts
                .next()
                .ok_or_else(|| IoFormatError::Parse {
                    path: pstr(path),
                    line: line_no,
                    msg: "expected three coordinates".into(),
                })?
                .parse()
                .map_err(|e| IoFormatError::Parse {
                    path: pstr(path),
                    line: line_no,
                    msg: format!("bad coordinate: {e}"),
                })?;
        }
        if parts.next().is_some() {
            return Err(IoFormatError::Parse {
                path: pstr(path),
                line: line_no,
                msg: "trailing fields".into(),
            });
        }
        if !coords.iter().all(|c| c.is_finite()) {
            return Err(IoFormatError::NonFinite {
                path: pstr(path),
                line: line_no,
            });
        }
        vertices.push(coords);
    }
    if vertices.len() != n {
        return Err(IoFormatError::CountMismatch {
            path: pstr(path),
            declared: n,
            found: vertices.len(),
        });
    }
    PolygonalCurve::from_vertices(vertices).map_err(|source| IoFormatError::Curve {
        path: pstr(path),
        source,
    })
}

pub fn read_xyz(path: &Path) -> Result<PolygonalCurve, IoFormatError> {
    let text = fs::read_to_string(path)?;
    parse_xyz_text(&text, path)
}

/// Writhe matrix as N rows of N comma-separated values.
pub fn write_writhe_matrix(path: &Path, w: &WritheMatrix) -> Result<(), IoFormatError> {
    let n = w.dim();
    let mut out = String::with_capacity(n * n * 20);
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt_sig12(w.get(i, j)));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a writhe matrix back, re-validating shape and symmetry (1e-6).
pub fn read_writhe_matrix(path: &Path) -> Result<WritheMatrix, IoFormatError> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim().parse().map_err(|e| IoFormatError::Parse {
                    path: pstr(path),
                    line: idx + 1,
                    msg: format!("bad entry: {e}"),
                })
            })
            .collect::<Result<_, _>>()?;
        if !row.iter().all(|v| v.is_finite()) {
            return Err(IoFormatError::NonFinite {
                path: pstr(path),
                line: idx + 1,
            });
        }
        rows.push(row);
    }
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(IoFormatError::NotSquare {
                path: pstr(path),
                rows: n,
                cols: row.len(),
                at: i + 1,
            });
        }
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (rows[i][j], rows[j][i]);
            if (a - b).abs() > 1e-6 {
                return Err(IoFormatError::Asymmetric {
                    path: pstr(path),
                    i,
                    j,
                    a,
                    b,
                });
            }
            data[i * n + j] = a;
        }
    }
    Ok(WritheMatrix::from_raw(n, data, 0))
}

/// One dataset manifest row.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub id: usize,
    pub label: String,
    /// Path of the coordinate file, relative to the manifest.
    pub path: String,
    pub seed: u64,
    pub chain: u64,
    pub functionals: FunctionalVector,
}

pub const MANIFEST_HEADER: &str =
    "id,label,path,seed,chain,sum_dist,writhe,curvature,max_dist,peaks_5,peaks_10,peaks_20,acn,entanglement,rg";

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<(), IoFormatError> {
    let mut out = String::with_capacity(rows.len() * 160 + 128);
    out.push_str(MANIFEST_HEADER);
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            r.id, r.label, r.path, r.seed, r.chain
        );
        for v in r.functionals.as_array() {
            out.push(',');
            out.push_str(&fmt_sig12(v));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>, IoFormatError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| IoFormatError::Parse {
        path: pstr(path),
        line: 1,
        msg: "empty manifest".into(),
    })?;
    if header.trim() != MANIFEST_HEADER {
        return Err(IoFormatError::Parse {
            path: pstr(path),
            line: 1,
            msg: "unexpected manifest header".into(),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 15 {
            return Err(IoFormatError::Parse {
                path: pstr(path),
                line: line_no,
                msg: format!("expected 15 fields, found {}", fields.len()),
            });
        }
        let parse_err = |msg: String| IoFormatError::Parse {
            path: pstr(path),
            line: line_no,
            msg,
        };
        let id = fields[0]
            .parse()
            .map_err(|e| parse_err(format!("bad id: {e}")))?;
        let seed = fields[3]
            .parse()
            .map_err(|e| parse_err(format!("bad seed: {e}")))?;
        let chain = fields[4]
            .parse()
            .map_err(|e| parse_err(format!("bad chain: {e}")))?;
        let mut fv = [0.0f64; 10];
        for (k, f) in fields[5..].iter().enumerate() {
            fv[k] = f
                .parse()
                .map_err(|e| parse_err(format!("bad functional: {e}")))?;
            if !fv[k].is_finite() {
                return Err(IoFormatError::NonFinite {
                    path: pstr(path),
                    line: line_no,
                });
            }
        }
        rows.push(ManifestRow {
            id,
            label: fields[1].to_string(),
            path: fields[2].to_string(),
            seed,
            chain,
            functionals: FunctionalVector::from_array(fv),
        });
    }
    Ok(rows)
}

/// Turn manifest rows into a probe-ready feature table (labels mapped to
/// dense indices by sorted label name).
pub fn manifest_to_table(
    rows: &[ManifestRow],
) -> Result<LabeledFeatureTable, crate::probe::ProbeError> {
    let mut label_names: Vec<String> = rows.iter().map(|r| r.label.clone()).collect();
    label_names.sort();
    label_names.dedup();
    let labels = rows
        .iter()
        .map(|r| label_names.iter().position(|l| l == &r.label).unwrap())
        .collect();
    LabeledFeatureTable::new(
        FunctionalVector::NAMES
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows.iter()
            .map(|r| r.functionals.as_array().to_vec())
            .collect(),
        labels,
        label_names,
    )
}

/// Write a merged dataset to `dir`: one XYZ file per record under `dir/xyz/`
/// plus `dir/manifest.csv`. Returns the manifest rows.
pub fn export_dataset(dataset: &Dataset, dir: &Path) -> Result<Vec<ManifestRow>, IoFormatError> {
    let xyz_dir = dir.join("xyz");
    fs::create_dir_all(&xyz_dir)?;
    let mut rows = Vec::with_capacity(dataset.records.len());
    for rec in &dataset.records {
        let rel: PathBuf = ["xyz", &format!("{:06}_{}.xyz", rec.id, rec.label)]
            .iter()
            .collect();
        write_xyz(&dir.join(&rel), &rec.curve)?;
        rows.push(ManifestRow {
            id: rec.id,
            label: rec.label.to_string(),
            path: rel.to_string_lossy().into_owned(),
            seed: rec.seed,
            chain: rec.chain_id,
            functionals: rec.functionals,
        });
    }
    write_manifest(&dir.join("manifest.csv"), &rows)?;
    Ok(rows)
}
