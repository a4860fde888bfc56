//! Alexander matrix of a knot diagram and its determinant.
//!
//! Rows come from the crossing relations of the Wirtinger presentation under
//! the Fox calculus: a positive crossing with over-arc o, incoming under-arc
//! i and outgoing under-arc j contributes (1-t, t, -1) on (o, i, j); a
//! negative crossing contributes the row multiplied through by t, keeping
//! entries polynomial. Deleting one row and one column and taking |det|
//! evaluates the Alexander polynomial up to units; at t = -1 this is the knot
//! determinant (unknot 1, trefoil 3, figure-eight 5).

use super::diagram::KnotDiagram;

/// Dense Alexander matrix with one row per crossing and one column per arc,
/// before deletion.
fn alexander_rows(diagram: &KnotDiagram, t: f64) -> Vec<Vec<f64>> {
    let n = diagram.crossing_count();
    let mut rows = vec![vec![0.0; n]; n];
    for (row, c) in rows.iter_mut().zip(diagram.crossings()) {
        if c.sign > 0 {
            row[c.over_arc] += 1.0 - t;
            row[c.under_in_arc] += t;
            row[c.under_out_arc] += -1.0;
        } else {
            row[c.over_arc] += t - 1.0;
            row[c.under_in_arc] += 1.0;
            row[c.under_out_arc] += -t;
        }
    }
    rows
}

/// |det| of the deleted Alexander matrix at a real parameter `t`.
///
/// A 0-crossing diagram returns 1 by the unknot convention. At t = -1 an
/// exact integer elimination is used; the result is then exact.
pub fn alexander_determinant(diagram: &KnotDiagram, t: f64) -> f64 {
    if diagram.crossing_count() == 0 {
        return 1.0;
    }
    if t == -1.0 {
        return alexander_determinant_int(diagram) as f64;
    }
    let rows = alexander_rows(diagram, t);
    let n = diagram.crossing_count() - 1;
    if n == 0 {
        return 1.0;
    }
    let mut m: Vec<Vec<f64>> = rows[..n].iter().map(|r| r[..n].to_vec()).collect();
    // LU with partial pivoting.
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&a, &b| m[a][k].abs().partial_cmp(&m[b][k].abs()).unwrap())
            .unwrap();
        if m[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det.abs()
}

/// Exact knot determinant |Delta(-1)| via fraction-free integer elimination.
pub fn alexander_determinant_int(diagram: &KnotDiagram) -> i64 {
    let c = diagram.crossing_count();
    if c == 0 {
        return 1;
    }
    let n = c - 1;
    if n == 0 {
        return 1;
    }
    // Integer rows at t = -1.
    let mut m = vec![vec![0i128; n]; n];
    for (k, cr) in diagram.crossings().iter().enumerate().take(n) {
        let row = &mut m[k];
        let (over, inn, out) = if cr.sign > 0 { (2, -1, -1) } else { (-2, 1, 1) };
        let mut add = |arc: usize, v: i128| {
            if arc < n {
                row[arc] += v;
            }
        };
        add(cr.over_arc, over);
        add(cr.under_in_arc, inn);
        add(cr.under_out_arc, out);
    }
    // Bareiss elimination.
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    (sign * m[n - 1][n - 1]).unsigned_abs() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::diagram::KnotDiagram;
    use crate::topology::testdiag::{table_figure_eight, table_trefoil};

    #[test]
    fn empty_diagram_is_unknot() {
        let d = KnotDiagram::from_gauss_events(&[], &[]);
        assert_eq!(alexander_determinant(&d, -1.0), 1.0);
        assert_eq!(alexander_determinant_int(&d), 1);
    }

    #[test]
    fn trefoil_determinant_is_three() {
        for chirality in [true, false] {
            let d = table_trefoil(chirality);
            assert_eq!(alexander_determinant_int(&d), 3, "chirality {chirality}");
            assert_eq!(alexander_determinant(&d, -1.0), 3.0);
        }
    }

    #[test]
    fn figure_eight_determinant_is_five() {
        assert_eq!(alexander_determinant_int(&table_figure_eight()), 5);
    }

    #[test]
    fn trefoil_polynomial_values() {
        // Delta(t) = t^2 - t + 1 up to units: |Delta(2)| = 3, |Delta(3)| = 7.
        let d = table_trefoil(true);
        let at = |t: f64| alexander_determinant(&d, t);
        // Units contribute powers of |t|, so compare ratios of the evaluated
        // |det| against the normalized polynomial only at |t| = 1.
        assert!((at(-1.0) - 3.0).abs() < 1e-9);
        // The float path must agree with the exact path at t = -1 + 0 (take a
        // nearby value and round-trip coarse agreement).
        assert!((at(-1.0 + 1e-12) - 3.0).abs() < 1e-3);
    }

    #[test]
    fn exact_and_float_paths_agree() {
        for d in [table_trefoil(true), table_figure_eight()] {
            let exact = alexander_determinant_int(&d) as f64;
            let float = {
                // Force the LU path by perturbing t infinitesimally.
                alexander_determinant(&d, -1.0 + 1e-13)
            };
            assert!((exact - float).abs() < 1e-6);
        }
    }
}
