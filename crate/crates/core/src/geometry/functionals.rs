//! Scalar functionals: distance sums, peak counts, curvature, entanglement,
//! radius of gyration.

use super::{DistanceMatrix, GeometryError, PolygonalCurve};
use crate::vec3::{dist, dot, norm, FVec};

/// Sum of pairwise distances over ordered pairs (both (i,j) and (j,i)).
pub fn sum_pairwise_distances(m: &DistanceMatrix) -> f64 {
    let n = m.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += m.get(i, j);
        }
    }
    2.0 * s
}

/// Largest pairwise distance.
pub fn max_pairwise_distance(m: &DistanceMatrix) -> f64 {
    let n = m.dim();
    let mut best = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            best = f64::max(best, m.get(i, j));
        }
    }
    best
}

/// Number of peaks of the distance matrix above tolerance `tol`: connected
/// components (4-adjacency in index space) of strict-upper-triangle entries
/// exceeding `tol`.
pub fn peak_count(m: &DistanceMatrix, tol: f64) -> usize {
    let n = m.dim();
    let idx = |i: usize, j: usize| i * n + j;
    // Union-find over upper-triangle cells that exceed the tolerance.
    let mut parent: Vec<usize> = (0..n * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    fn union(parent: &mut [usize], a: usize, b: usize) {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let hot = |i: usize, j: usize| j > i && m.get(i, j) > tol;
    for i in 0..n {
        for j in i + 1..n {
            if !hot(i, j) {
                continue;
            }
            if i + 1 < j && hot(i + 1, j) {
                union(&mut parent, idx(i, j), idx(i + 1, j));
            }
            if j + 1 < n && hot(i, j + 1) {
                union(&mut parent, idx(i, j), idx(i, j + 1));
            }
        }
    }
    let mut roots = std::collections::HashSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if hot(i, j) {
                roots.insert(find(&mut parent, idx(i, j)));
            }
        }
    }
    roots.len()
}

/// Total curvature: sum over vertices of the exterior angle between incoming
/// and outgoing edge vectors, in radians. At least 2*pi for any closed
/// polygon.
pub fn total_curvature(curve: &PolygonalCurve) -> f64 {
    let n = curve.len();
    let mut total = 0.0;
    for i in 0..n {
        let e_in = curve.edge((i + n - 1) % n);
        let e_out = curve.edge(i);
        let c = dot(e_in, e_out) / (norm(e_in) * norm(e_out));
        total += c.clamp(-1.0, 1.0).acos();
    }
    total
}

/// Which side of the sequence-separation threshold counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationMode {
    /// Cyclic index separation strictly greater than the threshold (default:
    /// counts genuinely non-local contacts).
    LongRange,
    /// Strictly less, reproducing the printed inequality.
    Literal,
}

/// Count unordered vertex pairs closer than `d_l` in space whose cyclic index
/// separation compares against `d_p` per `mode`.
pub fn long_range_entanglement(
    curve: &PolygonalCurve,
    d_l: f64,
    d_p: usize,
    mode: SeparationMode,
) -> Result<usize, GeometryError> {
    if !(d_l > 0.0) {
        return Err(GeometryError::InvalidThreshold(format!(
            "distance threshold must be positive, got {d_l}"
        )));
    }
    if d_p == 0 {
        return Err(GeometryError::InvalidThreshold(
            "sequence threshold must be positive".into(),
        ));
    }
    let n = curve.len();
    let pts = curve.vertices();
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if dist(pts[i], pts[j]) >= d_l {
                continue;
            }
            let q = j - i;
            let sep = q.min(n - q);
            let hit = match mode {
                SeparationMode::LongRange => sep > d_p,
                SeparationMode::Literal => sep < d_p,
            };
            if hit {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Root of the mean squared pairwise spread, `sqrt((1/N^2) sum |x_i - x_j|^2)`
/// over ordered pairs.
pub fn radius_of_gyration(curve: &PolygonalCurve) -> f64 {
    rg_of_points(curve.vertices())
}

pub(crate) fn rg_of_points(pts: &[FVec]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(pts[i], pts[j]);
            s += d * d;
        }
    }
    (2.0 * s / (n as f64 * n as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::{pairwise_distance_matrix, PolygonalCurve};
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sum_dist_square() {
        let m = pairwise_distance_matrix(&unit_square_curve());
        assert_abs_diff_eq!(
            sum_pairwise_distances(&m),
            8.0 + 4.0 * 2.0_f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn sum_dist_scales_linearly() {
        let c = random_closed_curve(30, 1);
        let m1 = pairwise_distance_matrix(&c);
        let m2 = pairwise_distance_matrix(&c.scale(3.5));
        assert_abs_diff_eq!(
            sum_pairwise_distances(&m2),
            3.5 * sum_pairwise_distances(&m1),
            epsilon = 1e-9
        );
    }

    #[test]
    fn sum_dist_matches_bruteforce() {
        let c = random_closed_curve(20, 2);
        let m = pairwise_distance_matrix(&c);
        let mut oracle = 0.0;
        for i in 0..20 {
            for j in 0..20 {
                if i != j {
                    oracle += crate::vec3::dist(c.vertex(i), c.vertex(j));
                }
            }
        }
        assert_abs_diff_eq!(sum_pairwise_distances(&m), oracle, epsilon = 1e-10);
    }

    #[test]
    fn max_dist_square_and_scaling() {
        let m = pairwise_distance_matrix(&unit_square_curve());
        assert_abs_diff_eq!(max_pairwise_distance(&m), 2.0_f64.sqrt(), epsilon = 1e-15);
        let c = random_closed_curve(25, 3);
        let a = max_pairwise_distance(&pairwise_distance_matrix(&c));
        let b = max_pairwise_distance(&pairwise_distance_matrix(&c.scale(2.0)));
        assert_abs_diff_eq!(b, 2.0 * a, epsilon = 1e-12);
    }

    #[test]
    fn peak_count_edge_cases() {
        let m = pairwise_distance_matrix(&unit_square_curve());
        // Everything below a huge tolerance.
        assert_eq!(peak_count(&m, 10.0), 0);
        // Only the two diagonal entries (0,2) and (1,3) exceed 1.2; they are
        // not 4-adjacent, giving two components.
        assert_eq!(peak_count(&m, 1.2), 2);
    }

    #[test]
    fn peak_count_single_entry() {
        let c = random_closed_curve(12, 4);
        let m = pairwise_distance_matrix(&c);
        let mut best = (0, 0);
        let mut second = 0.0;
        let mut top = 0.0;
        for i in 0..12 {
            for j in i + 1..12 {
                let v = m.get(i, j);
                if v > top {
                    second = top;
                    top = v;
                    best = (i, j);
                } else if v > second {
                    second = v;
                }
            }
        }
        let _ = best;
        let tol = (top + second) / 2.0;
        assert_eq!(peak_count(&m, tol), 1);
    }

    /// Independent flood-fill component counter.
    fn flood_fill_oracle(m: &super::super::DistanceMatrix, tol: f64) -> usize {
        let n = m.dim();
        let mut seen = vec![false; n * n];
        let hot = |i: usize, j: usize| j > i && m.get(i, j) > tol;
        let mut components = 0;
        for si in 0..n {
            for sj in si + 1..n {
                if !hot(si, sj) || seen[si * n + sj] {
                    continue;
                }
                components += 1;
                let mut stack = vec![(si, sj)];
                seen[si * n + sj] = true;
                while let Some((i, j)) = stack.pop() {
                    let push = |a: usize,
                                b: usize,
                                stack: &mut Vec<(usize, usize)>,
                                seen: &mut Vec<bool>| {
                        if hot(a, b) && !seen[a * n + b] {
                            seen[a * n + b] = true;
                            stack.push((a, b));
                        }
                    };
                    if i > 0 {
                        push(i - 1, j, &mut stack, &mut seen);
                    }
                    push(i + 1, j, &mut stack, &mut seen);
                    if j > 0 {
                        push(i, j - 1, &mut stack, &mut seen);
                    }
                    if j + 1 < n {
                        push(i, j + 1, &mut stack, &mut seen);
                    }
                }
            }
        }
        components
    }

    #[test]
    fn peak_count_matches_flood_fill() {
        for seed in 0..6 {
            let c = random_closed_curve(30, 100 + seed).scale(4.0);
            let m = pairwise_distance_matrix(&c);
            for tol in [5.0, 10.0, 20.0] {
                assert_eq!(
                    peak_count(&m, tol),
                    flood_fill_oracle(&m, tol),
                    "seed {seed} tol {tol}"
                );
            }
        }
    }

    #[test]
    fn curvature_square_and_ngons() {
        assert_abs_diff_eq!(
            total_curvature(&unit_square_curve()),
            2.0 * std::f64::consts::PI,
            epsilon = 1e-12
        );
        for n in [3usize, 5, 8, 17, 40] {
            let pts = (0..n)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    [t.cos(), t.sin(), 0.0]
                })
                .collect();
            let poly = PolygonalCurve::from_vertices(pts).unwrap();
            assert_abs_diff_eq!(
                total_curvature(&poly),
                2.0 * std::f64::consts::PI,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn curvature_is_rigid_motion_invariant_and_at_least_fenchel() {
        for seed in 0..8 {
            let c = random_closed_curve(40, 200 + seed);
            let k = total_curvature(&c);
            assert!(k >= 2.0 * std::f64::consts::PI - 1e-9, "Fenchel violated");
            assert_abs_diff_eq!(
                k,
                total_curvature(&c.translate([3.0, -2.0, 9.0])),
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(k, total_curvature(&c.scale(7.0)), epsilon = 1e-9);
            assert_abs_diff_eq!(k, total_curvature(&c.mirror()), epsilon = 1e-9);
        }
    }

    #[test]
    fn trefoil_curvature_exceeds_fary_milnor_bound() {
        let c = parametric_trefoil(80);
        assert!(total_curvature(&c) >= 4.0 * std::f64::consts::PI);
    }

    #[test]
    fn entanglement_square_is_zero() {
        // Max cyclic separation on a square is 2 <= 10, so nothing counts as
        // long range even though every pair is within distance 5.
        let e = long_range_entanglement(&unit_square_curve(), 5.0, 10, SeparationMode::LongRange)
            .unwrap();
        assert_eq!(e, 0);
    }

    #[test]
    fn entanglement_detects_near_arcs() {
        // Two long antiparallel rails 1 apart: distant in sequence, close in
        // space.
        let mut pts: Vec<[f64; 3]> = Vec::new();
        for i in 0..=39 {
            pts.push([i as f64, 0.0, 0.0]);
        }
        pts.push([40.0, 0.0, 0.0]);
        pts.push([40.0, 1.0, 0.0]);
        for i in (0..=39).rev() {
            pts.push([i as f64, 1.0, 0.0]);
        }
        pts.push([-1.0, 1.0, 0.0]);
        pts.push([-1.0, 0.0, 0.0]);
        let curve = PolygonalCurve::from_vertices(pts).unwrap();
        let e = long_range_entanglement(&curve, 5.0, 10, SeparationMode::LongRange).unwrap();
        assert!(e > 0);
        // Brute force oracle.
        let n = curve.len();
        let mut oracle = 0;
        for i in 0..n {
            for j in i + 1..n {
                let d = crate::vec3::dist(curve.vertex(i), curve.vertex(j));
                let sep = (j - i).min(n - (j - i));
                if d < 5.0 && sep > 10 {
                    oracle += 1;
                }
            }
        }
        assert_eq!(e, oracle);
    }

    #[test]
    fn entanglement_modes_partition_close_pairs() {
        let c = random_closed_curve(60, 9);
        let (d_l, d_p) = (5.0, 10usize);
        let lr = long_range_entanglement(&c, d_l, d_p, SeparationMode::LongRange).unwrap();
        let lit = long_range_entanglement(&c, d_l, d_p, SeparationMode::Literal).unwrap();
        let n = c.len();
        let mut close_not_at = 0;
        for i in 0..n {
            for j in i + 1..n {
                let d = crate::vec3::dist(c.vertex(i), c.vertex(j));
                let sep = (j - i).min(n - (j - i));
                if d < d_l && sep != d_p {
                    close_not_at += 1;
                }
            }
        }
        assert_eq!(lr + lit, close_not_at);
    }

    #[test]
    fn entanglement_rejects_bad_thresholds() {
        let c = random_closed_curve(20, 10);
        assert!(long_range_entanglement(&c, 0.0, 5, SeparationMode::LongRange).is_err());
        assert!(long_range_entanglement(&c, -1.0, 5, SeparationMode::LongRange).is_err());
        assert!(long_range_entanglement(&c, 5.0, 0, SeparationMode::LongRange).is_err());
    }

    #[test]
    fn rg_degenerate_and_scaling() {
        assert_eq!(rg_of_points(&[[1.0, 2.0, 3.0]; 5]), 0.0);
        let c = random_closed_curve(35, 11);
        assert_abs_diff_eq!(
            radius_of_gyration(&c.scale(4.0)),
            4.0 * radius_of_gyration(&c),
            epsilon = 1e-10
        );
    }

    #[test]
    fn rg_matches_bruteforce() {
        let c = random_closed_curve(50, 12);
        let n = c.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = crate::vec3::dist(c.vertex(i), c.vertex(j));
                s += d * d;
            }
        }
        let oracle = (s / (n as f64 * n as f64)).sqrt();
        assert_abs_diff_eq!(radius_of_gyration(&c), oracle, epsilon = 1e-12);
    }
}
