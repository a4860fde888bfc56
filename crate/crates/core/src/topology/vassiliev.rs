//! Second Vassiliev invariant: exact Gauss-diagram count and the
//! writhe-matrix contraction approximation.

use super::diagram::KnotDiagram;
use crate::geometry::WritheMatrix;
use std::f64::consts::PI;

/// Exact v2 from the Gauss diagram: signed count of interleaved crossing
/// pairs matching the pattern U(p) .. O(q) .. O(p) .. U(q) read from the
/// traversal base point. Normalized so v2(unknot) = 0 and v2(trefoil) = 1
/// for both chiralities; the figure-eight gives -1.
pub fn vassiliev_v2_exact(diagram: &KnotDiagram) -> i64 {
    let c = diagram.crossing_count();
    if c < 2 {
        return 0;
    }
    // Event rank of each passage.
    let mut over_pos = vec![0usize; c];
    let mut under_pos = vec![0usize; c];
    for (rank, e) in diagram.events().iter().enumerate() {
        if e.over {
            over_pos[e.crossing] = rank;
        } else {
            under_pos[e.crossing] = rank;
        }
    }
    let mut total = 0i64;
    for p in 0..c {
        for q in 0..c {
            if p == q {
                continue;
            }
            if under_pos[p] < over_pos[q] && over_pos[q] < over_pos[p] && over_pos[p] < under_pos[q]
            {
                total +=
                    (diagram.crossings()[p].sign as i64) * (diagram.crossings()[q].sign as i64);
            }
        }
    }
    total
}

/// Writhe-matrix contraction approximating v2: the alternating-pair sum
/// `sum_{i<j<k<l} w[i][k] * w[j][l] / (4 pi)^2`, evaluated in O(N^2) with 2D
/// prefix sums.
pub fn vassiliev_v2_writhe(w: &WritheMatrix) -> f64 {
    let n = w.dim();
    if n < 4 {
        return 0.0;
    }
    // prefix[a][b] = sum over i <= a, k <= b of w[i][k]  (1-based guards).
    let mut prefix = vec![0.0f64; (n + 1) * (n + 1)];
    let at = |p: &Vec<f64>, a: usize, b: usize| p[a * (n + 1) + b];
    for i in 0..n {
        for k in 0..n {
            let v = w.get(i, k);
            let idx = (i + 1) * (n + 1) + (k + 1);
            prefix[idx] = v + prefix[i * (n + 1) + (k + 1)] + prefix[(i + 1) * (n + 1) + k]
                - prefix[i * (n + 1) + k];
        }
    }
    let mut total = 0.0;
    for j in 1..n {
        for l in j + 2..n {
            let wjl = w.get(j, l);
            if wjl == 0.0 {
                continue;
            }
            // sum over i < j, j < k < l of w[i][k]:
            let inner = at(&prefix, j, l) - at(&prefix, j, j + 1);
            total += wjl * inner;
        }
    }
    total / ((4.0 * PI) * (4.0 * PI))
}

/// Straightforward O(N^4) evaluation of the same contraction; retained as an
/// oracle for tests.
#[cfg(test)]
pub(crate) fn vassiliev_v2_writhe_naive(w: &WritheMatrix) -> f64 {
    let n = w.dim();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    total += w.get(i, k) * w.get(j, l);
                }
            }
        }
    }
    total / ((4.0 * PI) * (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::super::testdiag::{table_figure_eight, table_trefoil};
    use super::*;
    use crate::geometry::testutil::{parametric_trefoil, random_closed_curve, unit_square_curve};
    use crate::geometry::writhe_matrix;

    #[test]
    fn unknot_diagrams_give_zero() {
        let empty = KnotDiagram::from_gauss_events(&[], &[]);
        assert_eq!(vassiliev_v2_exact(&empty), 0);
        // A single kink (Reidemeister I curl) still gives zero.
        let kink = KnotDiagram::from_gauss_events(&[(0, true), (0, false)], &[1]);
        assert_eq!(vassiliev_v2_exact(&kink), 0);
    }

    #[test]
    fn trefoil_v2_is_one_for_both_chiralities() {
        assert_eq!(vassiliev_v2_exact(&table_trefoil(true)), 1);
        assert_eq!(vassiliev_v2_exact(&table_trefoil(false)), 1);
    }

    #[test]
    fn figure_eight_v2_is_minus_one() {
        assert_eq!(vassiliev_v2_exact(&table_figure_eight()), -1);
    }

    #[test]
    fn planar_contraction_vanishes() {
        let w = writhe_matrix(&unit_square_curve());
        assert_eq!(vassiliev_v2_writhe(&w), 0.0);
    }

    #[test]
    fn prefix_sum_matches_naive_contraction() {
        for seed in 0..4 {
            let c = random_closed_curve(40, 700 + seed);
            let w = writhe_matrix(&c);
            let fast = vassiliev_v2_writhe(&w);
            let naive = vassiliev_v2_writhe_naive(&w);
            assert!(
                (fast - naive).abs() < 1e-9,
                "seed {seed}: {fast} vs {naive}"
            );
        }
    }

    #[test]
    fn trefoil_contraction_is_positive_and_near_one() {
        let w = writhe_matrix(&parametric_trefoil(100));
        let v = vassiliev_v2_writhe(&w);
        assert!(v > 0.3, "trefoil contraction suspiciously small: {v}");
    }

    #[test]
    fn contraction_is_mirror_even() {
        let c = random_closed_curve(30, 900);
        let v = vassiliev_v2_writhe(&writhe_matrix(&c));
        let vm = vassiliev_v2_writhe(&writhe_matrix(&c.mirror()));
        assert!((v - vm).abs() < 1e-9);
    }
}
