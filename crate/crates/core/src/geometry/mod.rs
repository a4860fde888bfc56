//! Geometric functionals of closed polygonal curves.
//!
//! All functions here are pure; curves are closed by convention (the segment
//! from the last vertex back to the first is implied). The writhe matrix uses
//! the exact solid-angle formula for segment pairs; the lattice writhe uses
//! the four-projection Tait-number average, exact for cubic-lattice polygons.
//! The two agree to floating-point accuracy, which the tests exploit as a
//! cross-oracle.

mod functionals;
mod tait;
mod writhe;

pub use functionals::{
    long_range_entanglement, max_pairwise_distance, peak_count, radius_of_gyration,
    sum_pairwise_distances, total_curvature, SeparationMode,
};
pub use tait::{lattice_writhe, tait_number, ProjectionAxis};
pub(crate) use writhe::segment_pair_solid_angle;
pub use writhe::{average_crossing_number, total_writhe, writhe_matrix, WritheMatrix};

use crate::vec3::{dist, FVec};
use thiserror::Error;

/// Minimum allowed distance between distinct vertices of a curve.
pub const CURVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("curve must have at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertices {0} and {1} coincide within tolerance")]
    CoincidentVertices(usize, usize),
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),
}

/// Closed polygon in continuous 3-space. The segment from the last vertex to
/// the first is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalCurve {
    vertices: Vec<FVec>,
}

impl PolygonalCurve {
    pub fn from_vertices(vertices: Vec<FVec>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(GeometryError::NonFinite(i));
            }
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if dist(vertices[i], vertices[j]) <= CURVE_TOLERANCE {
                return Err(GeometryError::CoincidentVertices(i, j));
            }
        }
        // Consecutive coincidences are the common failure mode; a full
        // pairwise check is still cheap at the sizes used here.
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if dist(vertices[i], vertices[j]) <= CURVE_TOLERANCE {
                    return Err(GeometryError::CoincidentVertices(i, j));
                }
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[FVec] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> FVec {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge vector leaving vertex `i` (cyclic).
    pub fn edge(&self, i: usize) -> FVec {
        let n = self.vertices.len();
        crate::vec3::fsub(self.vertices[(i + 1) % n], self.vertices[i % n])
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| crate::vec3::fscale(*v, c))
                .collect(),
        }
    }

    pub fn translate(&self, d: FVec) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| crate::vec3::fadd(*v, d))
                .collect(),
        }
    }

    /// Mirror image: reflection through the x = 0 plane.
    pub fn mirror(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| [-v[0], v[1], v[2]]).collect(),
        }
    }

    pub fn centroid(&self) -> FVec {
        let mut c = [0.0; 3];
        for v in &self.vertices {
            for k in 0..3 {
                c[k] += v[k];
            }
        }
        let n = self.vertices.len() as f64;
        [c[0] / n, c[1] / n, c[2] / n]
    }

    /// Translate so the centroid sits at the origin.
    pub fn centered(&self) -> Self {
        let c = self.centroid();
        self.translate([-c[0], -c[1], -c[2]])
    }
}

/// Symmetric matrix of pairwise vertex distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub(crate) fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }
}

/// Exact Euclidean distances between all vertex pairs.
pub fn pairwise_distance_matrix(curve: &PolygonalCurve) -> DistanceMatrix {
    let pts = curve.vertices();
    DistanceMatrix::from_fn(pts.len(), |i, j| dist(pts[i], pts[j]))
}

/// All functionals of one embedding, in dataset-column order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalVector {
    /// Sum of pairwise distances over ordered pairs.
    pub sum_dist: f64,
    /// Total space writhe.
    pub writhe: f64,
    /// Total curvature in radians.
    pub curvature: f64,
    /// Largest pairwise distance.
    pub max_dist: f64,
    /// Peak counts of the distance matrix at tolerances 5, 10, 20.
    pub peaks_5: f64,
    pub peaks_10: f64,
    pub peaks_20: f64,
    /// Average crossing number.
    pub acn: f64,
    /// Long-range entanglement count.
    pub entanglement: f64,
    /// Radius of gyration.
    pub rg: f64,
}

impl FunctionalVector {
    pub const NAMES: [&'static str; 10] = [
        "sum_dist",
        "writhe",
        "curvature",
        "max_dist",
        "peaks_5",
        "peaks_10",
        "peaks_20",
        "acn",
        "entanglement",
        "rg",
    ];

    pub fn as_array(&self) -> [f64; 10] {
        [
            self.sum_dist,
            self.writhe,
            self.curvature,
            self.max_dist,
            self.peaks_5,
            self.peaks_10,
            self.peaks_20,
            self.acn,
            self.entanglement,
            self.rg,
        ]
    }

    pub fn from_array(a: [f64; 10]) -> Self {
        FunctionalVector {
            sum_dist: a[0],
            writhe: a[1],
            curvature: a[2],
            max_dist: a[3],
            peaks_5: a[4],
            peaks_10: a[5],
            peaks_20: a[6],
            acn: a[7],
            entanglement: a[8],
            rg: a[9],
        }
    }
}

/// Default thresholds for the entanglement count.
pub const ENTANGLEMENT_DISTANCE: f64 = 5.0;
pub const ENTANGLEMENT_SEPARATION: usize = 10;

/// Compute the full functional battery in one pass.
///
/// When the originating lattice polygon is supplied, the writhe comes from
/// the exact four-projection lattice formula; otherwise from the solid-angle
/// matrix sum. Both are exact, so at zero jitter they agree to 1e-9.
pub fn functional_vector(
    curve: &PolygonalCurve,
    lattice: Option<&crate::lattice::LatticePolygon>,
) -> FunctionalVector {
    let m = pairwise_distance_matrix(curve);
    let w = writhe_matrix(curve);
    let writhe = match lattice {
        Some(poly) => lattice_writhe(poly),
        None => total_writhe(&w),
    };
    let entanglement = long_range_entanglement(
        curve,
        ENTANGLEMENT_DISTANCE,
        ENTANGLEMENT_SEPARATION,
        SeparationMode::LongRange,
    )
    .expect("default entanglement thresholds are valid") as f64;
    FunctionalVector {
        sum_dist: sum_pairwise_distances(&m),
        writhe,
        curvature: total_curvature(curve),
        max_dist: max_pairwise_distance(&m),
        peaks_5: peak_count(&m, 5.0) as f64,
        peaks_10: peak_count(&m, 10.0) as f64,
        peaks_20: peak_count(&m, 20.0) as f64,
        acn: average_crossing_number(&w),
        entanglement,
        rg: radius_of_gyration(curve),
    }
}
