//! Writhe matrix via exact solid-angle evaluation on segment pairs.
//!
//! For non-adjacent segments i and j the entry is the signed solid angle of
//! the Gauss map over the pair, computed from four unit normals of the
//! tetrahedron spanned by the segment endpoints. Self and adjacent pairs
//! contribute exactly zero (coplanar configurations). Summing all entries and
//! dividing by 4*pi gives the total space writhe.

use super::PolygonalCurve;
use crate::vec3::{cross, dot, fsub, norm, FVec};
use std::f64::consts::PI;

/// Cross products with norm below this are treated as degenerate (exactly
/// coplanar parallel segment pairs, common on the lattice).
const DEGENERACY_EPS: f64 = 1e-12;

/// Symmetric matrix of raw solid angles between segment pairs. Diagonal and
/// adjacent entries are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WritheMatrix {
    n: usize,
    data: Vec<f64>,
    degenerate_pairs: usize,
}

impl WritheMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Number of segment pairs whose solid angle was forced to zero because
    /// a defining normal vanished.
    pub fn degenerate_pairs(&self) -> usize {
        self.degenerate_pairs
    }

    pub(crate) fn from_raw(n: usize, data: Vec<f64>, degenerate_pairs: usize) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self {
            n,
            data,
            degenerate_pairs,
        }
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Signed solid angle between segment (a1 -> a2) and segment (b1 -> b2).
/// Returns `(value, degenerate)`.
pub(crate) fn segment_pair_solid_angle(a1: FVec, a2: FVec, b1: FVec, b2: FVec) -> (f64, bool) {
    let r12 = fsub(a2, a1);
    let r34 = fsub(b2, b1);
    let r13 = fsub(b1, a1);
    let r14 = fsub(b2, a1);
    let r23 = fsub(b1, a2);
    let r24 = fsub(b2, a2);

    let sign_arg = dot(cross(r34, r12), r13);

    let normals = [
        cross(r13, r14),
        cross(r14, r24),
        cross(r24, r23),
        cross(r23, r13),
    ];
    let mut unit = [[0.0; 3]; 4];
    for (k, v) in normals.iter().enumerate() {
        let len = norm(*v);
        if len < DEGENERACY_EPS {
            // Vanishing normal: coplanar parallel configuration, zero solid
            // angle in the limit.
            return (0.0, true);
        }
        unit[k] = [v[0] / len, v[1] / len, v[2] / len];
    }
    let mut omega = 0.0;
    for k in 0..4 {
        let c = dot(unit[k], unit[(k + 1) % 4]).clamp(-1.0, 1.0);
        omega += c.asin();
    }
    if sign_arg > 0.0 {
        (omega, false)
    } else if sign_arg < 0.0 {
        (-omega, false)
    } else {
        (0.0, false)
    }
}

/// Compute the full writhe matrix of a closed curve.
pub fn writhe_matrix(curve: &PolygonalCurve) -> WritheMatrix {
    let n = curve.len();
    let pts = curve.vertices();
    let mut data = vec![0.0; n * n];
    let mut degenerate = 0;
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue; // cyclically adjacent
            }
            let (w, deg) =
                segment_pair_solid_angle(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]);
            if deg {
                degenerate += 1;
            }
            data[i * n + j] = w;
            data[j * n + i] = w;
        }
    }
    WritheMatrix::from_raw(n, data, degenerate)
}

/// Total space writhe: the normalized sum of all matrix entries.
pub fn total_writhe(w: &WritheMatrix) -> f64 {
    w.data().iter().sum::<f64>() / (4.0 * PI)
}

/// Average crossing number: the normalized sum of absolute entries.
pub fn average_crossing_number(w: &WritheMatrix) -> f64 {
    w.data().iter().map(|v| v.abs()).sum::<f64>() / (4.0 * PI)
}
