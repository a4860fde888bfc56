//! Lattice writhe from four corner projections.
//!
//! For cubic-lattice polygons the space writhe equals the mean of the Tait
//! numbers (signed crossing counts) of the projections along the four body
//! diagonals (1,1,1), (1,1,-1), (1,-1,1), (-1,1,1). Those projections are
//! degenerate for lattice input, so crossings are resolved with a symbolic
//! perturbation: the projected position of a point is shifted by
//! `eps * depth * w` for a fixed 2D vector `w`, with `eps` an infinitesimal.
//! All predicates become short integer polynomials in `eps` whose sign is the
//! sign of the lowest-order nonzero coefficient; no floating point is
//! involved, so Tait numbers are exact and deterministic.

use crate::lattice::LatticePolygon;
use crate::vec3::IVec;

/// The four projection directions used by the lattice writhe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionAxis {
    Ppp,
    Ppm,
    Pmp,
    Mpp,
}

impl ProjectionAxis {
    pub const ALL: [ProjectionAxis; 4] = [
        ProjectionAxis::Ppp,
        ProjectionAxis::Ppm,
        ProjectionAxis::Pmp,
        ProjectionAxis::Mpp,
    ];

    pub fn direction(self) -> IVec {
        match self {
            ProjectionAxis::Ppp => [1, 1, 1],
            ProjectionAxis::Ppm => [1, 1, -1],
            ProjectionAxis::Pmp => [1, -1, 1],
            ProjectionAxis::Mpp => [-1, 1, 1],
        }
    }

    /// Integer plane functionals (a, b) with a.c = b.c = 0 and a x b = +2c,
    /// so the 2D frame is right-handed as seen from the +c side.
    fn plane_basis(self) -> (IVec, IVec) {
        match self {
            ProjectionAxis::Ppp => ([1, -1, 0], [1, 1, -2]),
            ProjectionAxis::Ppm => ([1, -1, 0], [-1, -1, -2]),
            ProjectionAxis::Pmp => ([1, 1, 0], [-1, 1, 2]),
            ProjectionAxis::Mpp => ([1, 1, 0], [-1, 1, -2]),
        }
    }
}

/// Tilt direction of the symbolic perturbation, chosen non-parallel to every
/// projected lattice edge direction for all four axes.
const TILT: [i64; 2] = [1, 3];

fn idot(a: IVec, x: IVec) -> i64 {
    a[0] as i64 * x[0] as i64 + a[1] as i64 * x[1] as i64 + a[2] as i64 * x[2] as i64
}

/// Degree <= 2 polynomial in the perturbation parameter.
type EPoly = [i128; 3];

fn poly_sign(p: EPoly) -> i32 {
    for c in p {
        if c != 0 {
            return if c > 0 { 1 } else { -1 };
        }
    }
    0
}

fn poly_sub(a: EPoly, b: EPoly) -> EPoly {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Product of two degree <= 1 polynomials.
fn mul1(a: [i128; 2], b: [i128; 2]) -> EPoly {
    [a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1]]
}

/// Perturbed 2D point: coordinates are degree-1 polynomials in eps.
#[derive(Clone, Copy)]
struct PPoint {
    x: [i128; 2],
    y: [i128; 2],
    depth: i64,
}

fn orient(a: PPoint, b: PPoint, p: PPoint) -> EPoly {
    let bax = [b.x[0] - a.x[0], b.x[1] - a.x[1]];
    let bay = [b.y[0] - a.y[0], b.y[1] - a.y[1]];
    let pax = [p.x[0] - a.x[0], p.x[1] - a.x[1]];
    let pay = [p.y[0] - a.y[0], p.y[1] - a.y[1]];
    poly_sub(mul1(bax, pay), mul1(bay, pax))
}

/// Signed crossing count of the projection of `poly` along `axis`, with all
/// lattice degeneracies resolved by the symbolic tilt.
pub fn tait_number(poly: &LatticePolygon, axis: ProjectionAxis) -> i64 {
    let (a, b) = axis.plane_basis();
    let c = axis.direction();
    let pts: Vec<PPoint> = poly
        .vertices()
        .iter()
        .map(|&v| {
            let u = idot(a, v);
            let w = idot(b, v);
            let h = idot(c, v);
            debug_assert!(u.abs() < 1 << 40 && w.abs() < 1 << 40);
            PPoint {
                x: [u as i128, (h * TILT[0]) as i128],
                y: [w as i128, (h * TILT[1]) as i128],
                depth: h,
            }
        })
        .collect();
    let n = pts.len();
    let mut tait = 0i64;
    for i in 0..n {
        let a1 = pts[i];
        let a2 = pts[(i + 1) % n];
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue; // cyclically adjacent
            }
            let b1 = pts[j];
            let b2 = pts[(j + 1) % n];
            let o1 = orient(a1, a2, b1);
            let o2 = orient(a1, a2, b2);
            let s1 = poly_sign(o1);
            let s2 = poly_sign(o2);
            if s1 * s2 >= 0 {
                continue;
            }
            let o3 = orient(b1, b2, a1);
            let o4 = orient(b1, b2, a2);
            let s3 = poly_sign(o3);
            let s4 = poly_sign(o4);
            if s3 * s4 >= 0 {
                continue;
            }
            // Transversal crossing. Compare depths of the two strands at the
            // intersection: D = [hA + s*(hB-hA)] - [hP + t*(hQ-hP)] with
            // s* = o3/(o3-o4), t* = o1/(o1-o2), cleared of denominators.
            let d34 = poly_sub(o3, o4);
            let d12 = poly_sub(o1, o2);
            let dh_i = (a2.depth - a1.depth) as i128; // +-1
            let dh_j = (b2.depth - b1.depth) as i128; // +-1
            let base = (a1.depth - b1.depth) as i128;
            let mut num = [0i128; 3];
            // base * d34 * d12: d34 and d12 have degree <= 1 here because the
            // orientation eps^2 terms cancel identically (the perturbation is
            // a shear).
            debug_assert_eq!(d34[2], 0);
            debug_assert_eq!(d12[2], 0);
            let d34_1 = [d34[0], d34[1]];
            let d12_1 = [d12[0], d12[1]];
            let dd = mul1(d34_1, d12_1);
            for k in 0..3 {
                num[k] += base * dd[k];
            }
            debug_assert_eq!(o3[2], 0);
            debug_assert_eq!(o1[2], 0);
            let t1 = mul1([o3[0], o3[1]], d12_1);
            let t2 = mul1([o1[0], o1[1]], d34_1);
            for k in 0..3 {
                num[k] += dh_i * t1[k] - dh_j * t2[k];
            }
            let depth_sign = poly_sign(num) * poly_sign(d34) * poly_sign(d12);
            debug_assert_ne!(depth_sign, 0, "segments of a SAP cannot intersect");
            // Direction determinant at order zero: projected directions of
            // distinct crossing edges are never parallel.
            let di = [a2.x[0] - a1.x[0], a2.y[0] - a1.y[0]];
            let dj = [b2.x[0] - b1.x[0], b2.y[0] - b1.y[0]];
            let dirdet = di[0] * dj[1] - di[1] * dj[0];
            debug_assert_ne!(dirdet, 0);
            let dir_sign = if dirdet > 0 { 1 } else { -1 };
            // Crossing sign: det(d_over, d_under) seen from the +c side.
            tait += if depth_sign > 0 { dir_sign } else { -dir_sign } as i64;
        }
    }
    tait
}

/// Exact space writhe of a lattice polygon: mean Tait number over the four
/// corner projections.
pub fn lattice_writhe(poly: &LatticePolygon) -> f64 {
    let sum: i64 = ProjectionAxis::ALL
        .iter()
        .map(|&axis| tait_number(poly, axis))
        .sum();
    sum as f64 / 4.0
}
