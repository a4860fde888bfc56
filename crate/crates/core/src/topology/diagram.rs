//! Generic planar projection of a closed curve into a knot diagram.
//!
//! A diagram records, for every transversal crossing of the projected curve,
//! which strand passes over, the crossing sign (right-hand rule as seen from
//! the viewer side), and the arcs incident to the underpass. Arcs are the
//! maximal pieces of the curve between consecutive underpasses, numbered in
//! traversal order.

use crate::geometry::PolygonalCurve;
use crate::vec3::{cross, dot, norm, normalize, FVec};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProjectionError {
    #[error("no generic projection direction found after {0} deterministic tilts")]
    NonGeneric(usize),
    #[error("direction must be nonzero")]
    ZeroDirection,
}

/// One crossing of a knot diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    /// Arc passing over.
    pub over_arc: usize,
    /// Arc ending at the underpass.
    pub under_in_arc: usize,
    /// Arc starting at the underpass.
    pub under_out_arc: usize,
    /// +1 or -1 by the right-hand rule.
    pub sign: i8,
}

/// Passage event along the curve: each crossing appears once as an overpass
/// and once as an underpass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussEvent {
    pub crossing: usize,
    pub over: bool,
    /// Curve parameter (segment index plus fraction) of the passage.
    pub position: f64,
}

/// Knot diagram from a generic planar projection.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotDiagram {
    crossings: Vec<Crossing>,
    events: Vec<GaussEvent>,
}

impl KnotDiagram {
    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Number of arcs; equals the crossing count for diagrams with at least
    /// one crossing.
    pub fn arc_count(&self) -> usize {
        self.crossings.len()
    }

    /// Gauss events in traversal order.
    pub fn events(&self) -> &[GaussEvent] {
        &self.events
    }

    /// Sum of crossing signs (the Tait number of this projection).
    pub fn signed_sum(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }

    /// Debug dump: "O1+ U2- ..." in traversal order, crossings 1-based.
    pub fn gauss_code(&self) -> String {
        let mut out = String::new();
        for (k, e) in self.events.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push(if e.over { 'O' } else { 'U' });
            out.push_str(&(e.crossing + 1).to_string());
            out.push(if self.crossings[e.crossing].sign > 0 {
                '+'
            } else {
                '-'
            });
        }
        out
    }

    /// Construct a diagram directly from an event sequence and signs; used by
    /// tests with hand-coded table diagrams. Events carry fabricated
    /// positions in list order.
    pub fn from_gauss_events(order: &[(usize, bool)], signs: &[i8]) -> Self {
        let events: Vec<GaussEvent> = order
            .iter()
            .enumerate()
            .map(|(k, &(crossing, over))| GaussEvent {
                crossing,
                over,
                position: k as f64,
            })
            .collect();
        let crossings = build_crossings(&events, signs);
        KnotDiagram { crossings, events }
    }
}

/// Assign arcs from the ordered events and per-crossing signs.
fn build_crossings(events: &[GaussEvent], signs: &[i8]) -> Vec<Crossing> {
    let n_crossings = signs.len();
    if n_crossings == 0 {
        return Vec::new();
    }
    // Underpass positions in traversal order; arc k starts at the k-th
    // underpass.
    let mut under_order: Vec<(f64, usize)> = events
        .iter()
        .filter(|e| !e.over)
        .map(|e| (e.position, e.crossing))
        .collect();
    under_order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    debug_assert_eq!(under_order.len(), n_crossings);
    let arc_of = |t: f64| -> usize {
        // Largest k with under_position[k] <= t, wrapping below the first.
        match under_order.iter().rposition(|&(u, _)| u <= t) {
            Some(k) => k,
            None => n_crossings - 1,
        }
    };
    let mut crossings = vec![
        Crossing {
            over_arc: usize::MAX,
            under_in_arc: usize::MAX,
            under_out_arc: usize::MAX,
            sign: 0,
        };
        n_crossings
    ];
    for (k, &(_, c)) in under_order.iter().enumerate() {
        crossings[c].under_out_arc = k;
        crossings[c].under_in_arc = (k + n_crossings - 1) % n_crossings;
        crossings[c].sign = signs[c];
    }
    for e in events.iter().filter(|e| e.over) {
        crossings[e.crossing].over_arc = arc_of(e.position);
    }
    debug_assert!(crossings
        .iter()
        .all(|c| c.over_arc != usize::MAX && c.under_in_arc != usize::MAX));
    crossings
}

/// Outcome of a single projection attempt.
enum Attempt {
    Diagram(KnotDiagram),
    /// The direction is too close to a degenerate configuration.
    Degenerate,
}

/// Relative tolerance for genericity decisions.
const GENERIC_EPS: f64 = 1e-9;

fn attempt_projection(curve: &PolygonalCurve, dir: FVec) -> Attempt {
    let n = curve.len();
    let dir = normalize(dir);
    // Right-handed frame (e_u, e_v, dir).
    let seed_axis = {
        let mut k = 0;
        for i in 1..3 {
            if dir[i].abs() < dir[k].abs() {
                k = i;
            }
        }
        let mut a = [0.0; 3];
        a[k] = 1.0;
        a
    };
    let e_u = normalize(cross(seed_axis, dir));
    let e_v = cross(dir, e_u);

    let p2: Vec<[f64; 2]> = curve
        .vertices()
        .iter()
        .map(|&v| [dot(v, e_u), dot(v, e_v)])
        .collect();
    let depth: Vec<f64> = curve.vertices().iter().map(|&v| dot(v, dir)).collect();
    let scale = curve
        .vertices()
        .iter()
        .map(|v| norm(*v))
        .fold(1.0_f64, f64::max);

    let cross2 = |a: [f64; 2], b: [f64; 2]| a[0] * b[1] - a[1] * b[0];
    let sub2 = |a: [f64; 2], b: [f64; 2]| [a[0] - b[0], a[1] - b[1]];

    struct RawCrossing {
        t_over: f64,
        t_under: f64,
        sign: i8,
    }
    let mut raw: Vec<RawCrossing> = Vec::new();
    // Events per segment for the duplicate-parameter genericity check.
    let mut per_segment: Vec<Vec<f64>> = vec![Vec::new(); n];

    for i in 0..n {
        let a1 = p2[i];
        let a2 = p2[(i + 1) % n];
        let d1 = sub2(a2, a1);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let b1 = p2[j];
            let b2 = p2[(j + 1) % n];
            let d2 = sub2(b2, b1);
            let denom = cross2(d1, d2);
            let d1n = (d1[0] * d1[0] + d1[1] * d1[1]).sqrt();
            let d2n = (d2[0] * d2[0] + d2[1] * d2[1]).sqrt();
            let r = sub2(b1, a1);
            if denom.abs() < GENERIC_EPS * d1n * d2n {
                // Near-parallel projections. Harmless unless the segments are
                // also nearly collinear: segments on one 3D lattice line
                // project to collinear but disjoint intervals for every
                // direction, so only an actual interval overlap is ambiguous.
                let line_dist = |p: [f64; 2]| (cross2(sub2(p, a1), d1) / d1n).abs();
                if line_dist(b1) < GENERIC_EPS * scale || line_dist(b2) < GENERIC_EPS * scale {
                    let along = |p: [f64; 2]| {
                        let d = sub2(p, a1);
                        (d[0] * d1[0] + d[1] * d1[1]) / (d1n * d1n)
                    };
                    let (t1, t2) = (along(b1), along(b2));
                    let (lo, hi) = (t1.min(t2), t1.max(t2));
                    if hi < -GENERIC_EPS || lo > 1.0 + GENERIC_EPS {
                        continue; // collinear but separated along the line
                    }
                    return Attempt::Degenerate;
                }
                continue;
            }
            let s = cross2(r, d2) / denom;
            let u = cross2(r, d1) / denom;
            let m = GENERIC_EPS;
            let inside = |x: f64| x > m && x < 1.0 - m;
            let gray = |x: f64| (x > -m && x <= m) || (x >= 1.0 - m && x < 1.0 + m);
            if gray(s) && (u > -m && u < 1.0 + m) {
                return Attempt::Degenerate;
            }
            if gray(u) && (s > -m && s < 1.0 + m) {
                return Attempt::Degenerate;
            }
            if !(inside(s) && inside(u)) {
                continue;
            }
            let z1 = depth[i] + s * (depth[(i + 1) % n] - depth[i]);
            let z2 = depth[j] + u * (depth[(j + 1) % n] - depth[j]);
            if (z1 - z2).abs() < GENERIC_EPS * scale {
                return Attempt::Degenerate;
            }
            let (t_over, t_under, d_over, d_under) = if z1 > z2 {
                (i as f64 + s, j as f64 + u, d1, d2)
            } else {
                (j as f64 + u, i as f64 + s, d2, d1)
            };
            let sign = if cross2(d_over, d_under) > 0.0 { 1 } else { -1 };
            per_segment[i].push(s);
            per_segment[j].push(u);
            raw.push(RawCrossing {
                t_over,
                t_under,
                sign,
            });
        }
    }
    // Two crossings too close along one segment make the arc order ambiguous.
    for params in &mut per_segment {
        params.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in params.windows(2) {
            if w[1] - w[0] < GENERIC_EPS {
                return Attempt::Degenerate;
            }
        }
    }

    let mut events: Vec<GaussEvent> = Vec::with_capacity(2 * raw.len());
    let mut signs = Vec::with_capacity(raw.len());
    for (c, rc) in raw.iter().enumerate() {
        events.push(GaussEvent {
            crossing: c,
            over: true,
            position: rc.t_over,
        });
        events.push(GaussEvent {
            crossing: c,
            over: false,
            position: rc.t_under,
        });
        signs.push(rc.sign);
    }
    events.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap());
    let crossings = build_crossings(&events, &signs);
    Attempt::Diagram(KnotDiagram { crossings, events })
}

/// Maximum deterministic tilts tried before giving up on a direction.
pub const MAX_TILTS: usize = 32;

/// Project a closed curve along `direction` and build its knot diagram.
///
/// Non-generic directions are retried with a fixed sequence of deterministic
/// tilts; pathological input exhausts the sequence and errors out.
pub fn project_to_diagram(
    curve: &PolygonalCurve,
    direction: FVec,
) -> Result<KnotDiagram, ProjectionError> {
    if norm(direction) == 0.0 {
        return Err(ProjectionError::ZeroDirection);
    }
    let mut dir = normalize(direction);
    for k in 0..MAX_TILTS {
        match attempt_projection(curve, dir) {
            Attempt::Diagram(d) => return Ok(d),
            Attempt::Degenerate => {
                let t = tilt_vector(k);
                let step = 1e-4 * (k + 1) as f64;
                dir = normalize([
                    dir[0] + step * t[0],
                    dir[1] + step * t[1],
                    dir[2] + step * t[2],
                ]);
            }
        }
    }
    Err(ProjectionError::NonGeneric(MAX_TILTS))
}

/// Fixed tilt sequence shared by all projections.
fn tilt_vector(k: usize) -> FVec {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7a17_5eed ^ k as u64);
    let v: FVec = [
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    ];
    normalize(v)
}
