//! BFACF and pivot Monte Carlo moves.
//!
//! BFACF moves act on a randomly chosen site: insert a two-vertex detour
//! perpendicular to an edge (grow, N -> N+2), collapse a U-shaped detour
//! (shrink, N -> N-2), or reflect a corner vertex across its unit square
//! (flip, N unchanged). All three sweep at most one unit lattice face, which
//! no other strand can pierce, so the knot class is preserved.
//!
//! Pivot moves cut the polygon at two edges and apply a lattice point-group
//! element fixing both endpoints of the longer connecting arc. They mix
//! geometry quickly but may change the knot class; callers must verify.

use super::LatticePolygon;
use crate::vec3::{iadd, ineg, isub, IVec};
use rand::Rng;
use std::collections::HashSet;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    BfacfGrow,
    BfacfShrink,
    BfacfFlip,
    Pivot,
}

/// Result of one proposed move. `delta_length` is +-2 for grow/shrink and 0
/// for flip and pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveOutcome {
    pub accepted: bool,
    pub kind: MoveKind,
    pub delta_length: i32,
}

impl MoveOutcome {
    fn rejected(kind: MoveKind) -> Self {
        MoveOutcome {
            accepted: false,
            kind,
            delta_length: 0,
        }
    }
}

/// Geometrically feasible BFACF proposal, not yet applied.
#[derive(Debug, Clone)]
pub(crate) enum BfacfProposal {
    /// Insert vertices `a`, `b` after `edge`.
    Grow { edge: usize, a: IVec, b: IVec },
    /// Remove vertices `vertex+1`, `vertex+2` (a U-shaped detour).
    Shrink { vertex: usize },
    /// Move corner vertex `vertex` to `to`.
    Flip { vertex: usize, to: IVec },
}

impl BfacfProposal {
    pub(crate) fn delta_length(&self) -> i32 {
        match self {
            BfacfProposal::Grow { .. } => 2,
            BfacfProposal::Shrink { .. } => -2,
            BfacfProposal::Flip { .. } => 0,
        }
    }
}

/// The four unit vectors perpendicular to a unit step `d`.
fn perpendicular_dirs(d: IVec) -> [IVec; 4] {
    let axis = (0..3).find(|&k| d[k] != 0).expect("unit step");
    let (u, v) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut out = [[0i32; 3]; 4];
    out[0][u] = 1;
    out[1][u] = -1;
    out[2][v] = 1;
    out[3][v] = -1;
    out
}

pub(crate) fn propose_grow(
    poly: &LatticePolygon,
    edge: usize,
    dir: IVec,
    max_length: usize,
) -> Option<BfacfProposal> {
    if poly.len() + 2 > max_length {
        return None;
    }
    let n = poly.len();
    let a = iadd(poly.vertex(edge), dir);
    let b = iadd(poly.vertex((edge + 1) % n), dir);
    if poly.is_occupied(a) || poly.is_occupied(b) {
        return None;
    }
    Some(BfacfProposal::Grow {
        edge: edge % n,
        a,
        b,
    })
}

pub(crate) fn propose_shrink(poly: &LatticePolygon, vertex: usize) -> Option<BfacfProposal> {
    if poly.len() <= 4 {
        return None;
    }
    // U-shape: the edge leaving `vertex` is the reverse of the edge leaving
    // `vertex + 2`; collapsing removes the two middle vertices.
    let w = poly.edge_dir(vertex);
    let back = poly.edge_dir(vertex + 2);
    if w == ineg(back) {
        Some(BfacfProposal::Shrink {
            vertex: vertex % poly.len(),
        })
    } else {
        None
    }
}

pub(crate) fn propose_flip(poly: &LatticePolygon, vertex: usize) -> Option<BfacfProposal> {
    let n = poly.len();
    let u = poly.edge_dir((vertex + n - 1) % n);
    let w = poly.edge_dir(vertex);
    if u == w {
        return None; // straight run, no corner to reflect
    }
    let to = iadd(poly.vertex((vertex + n - 1) % n), w);
    if poly.is_occupied(to) {
        return None;
    }
    Some(BfacfProposal::Flip {
        vertex: vertex % n,
        to,
    })
}

pub(crate) fn apply_bfacf(poly: &mut LatticePolygon, proposal: &BfacfProposal) {
    match *proposal {
        BfacfProposal::Grow { edge, a, b } => poly.insert_pair(edge, a, b),
        BfacfProposal::Shrink { vertex } => poly.remove_pair(vertex + 1),
        BfacfProposal::Flip { vertex, to } => poly.move_vertex(vertex, to),
    }
    #[cfg(debug_assertions)]
    poly.debug_validate();
}

/// Draw one BFACF proposal: grow/shrink/flip with probabilities
/// 0.25/0.25/0.5 at a uniformly random site. Returns the attempted kind and
/// the proposal when geometrically feasible.
pub(crate) fn random_bfacf_proposal<R: Rng>(
    poly: &LatticePolygon,
    rng: &mut R,
    max_length: usize,
) -> (MoveKind, Option<BfacfProposal>) {
    let n = poly.len();
    let r: f64 = rng.gen();
    let site = rng.gen_range(0..n);
    if r < 0.25 {
        let dirs = perpendicular_dirs(poly.edge_dir(site));
        let dir = dirs[rng.gen_range(0..4)];
        (
            MoveKind::BfacfGrow,
            propose_grow(poly, site, dir, max_length),
        )
    } else if r < 0.5 {
        (MoveKind::BfacfShrink, propose_shrink(poly, site))
    } else {
        (MoveKind::BfacfFlip, propose_flip(poly, site))
    }
}

/// Propose and, when feasible, apply one BFACF move.
///
/// Rejected proposals leave the polygon unchanged. Accepted moves always
/// yield a valid polygon of the same knot class.
pub fn bfacf_move<R: Rng>(
    poly: &mut LatticePolygon,
    rng: &mut R,
    max_length: usize,
) -> MoveOutcome {
    let (kind, proposal) = random_bfacf_proposal(poly, rng, max_length);
    match proposal {
        Some(p) => {
            let delta = p.delta_length();
            apply_bfacf(poly, &p);
            MoveOutcome {
                accepted: true,
                kind,
                delta_length: delta,
            }
        }
        None => MoveOutcome::rejected(kind),
    }
}

// Deterministic single-move entry points used by tests.

#[cfg(test)]
pub(crate) fn try_grow(
    poly: &mut LatticePolygon,
    edge: usize,
    dir: IVec,
    max_length: usize,
) -> bool {
    match propose_grow(poly, edge, dir, max_length) {
        Some(p) => {
            apply_bfacf(poly, &p);
            true
        }
        None => false,
    }
}

#[cfg(test)]
pub(crate) fn try_shrink(poly: &mut LatticePolygon, vertex: usize) -> bool {
    match propose_shrink(poly, vertex) {
        Some(p) => {
            apply_bfacf(poly, &p);
            true
        }
        None => false,
    }
}

#[cfg(test)]
pub(crate) fn try_flip(poly: &mut LatticePolygon, vertex: usize) -> bool {
    match propose_flip(poly, vertex) {
        Some(p) => {
            apply_bfacf(poly, &p);
            true
        }
        None => false,
    }
}

/// Element of the octahedral point group: `out[k] = signs[k] * v[perm[k]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SignedPerm {
    perm: [usize; 3],
    signs: [i32; 3],
}

impl SignedPerm {
    pub(crate) fn apply(&self, v: IVec) -> IVec {
        [
            self.signs[0] * v[self.perm[0]],
            self.signs[1] * v[self.perm[1]],
            self.signs[2] * v[self.perm[2]],
        ]
    }

    #[cfg(test)]
    pub(crate) fn is_identity(&self) -> bool {
        self.perm == [0, 1, 2] && self.signs == [1, 1, 1]
    }
}

/// All 48 signed permutation matrices, in a fixed order (identity first).
pub(crate) fn octahedral_group() -> &'static [SignedPerm] {
    static GROUP: OnceLock<Vec<SignedPerm>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut out = Vec::with_capacity(48);
        for perm in perms {
            for bits in 0..8u32 {
                let signs = [
                    if bits & 1 == 0 { 1 } else { -1 },
                    if bits & 2 == 0 { 1 } else { -1 },
                    if bits & 4 == 0 { 1 } else { -1 },
                ];
                out.push(SignedPerm { perm, signs });
            }
        }
        out
    })
}

/// Point-group elements fixing the vector `d`.
pub(crate) fn stabilizer(d: IVec) -> Vec<&'static SignedPerm> {
    octahedral_group()
        .iter()
        .filter(|g| g.apply(d) == d)
        .collect()
}

/// Feasible pivot proposal: interior vertices of one arc and their images.
#[derive(Debug, Clone)]
pub(crate) struct PivotProposal {
    pub(crate) indices: Vec<usize>,
    pub(crate) new_pos: Vec<IVec>,
}

/// Build a pivot proposal for the pair of edges `(edge_a, edge_b)` and group
/// element `g`. The longer arc strictly between the two edges is rotated
/// about the axis through its endpoints; `g` must fix the endpoint
/// difference. Returns `None` when the transformed arc collides with the rest
/// of the polygon, or when `g` does not fix the axis.
pub(crate) fn propose_pivot_with(
    poly: &LatticePolygon,
    edge_a: usize,
    edge_b: usize,
    g: &SignedPerm,
) -> Option<PivotProposal> {
    let n = poly.len();
    let (a, b) = (edge_a.min(edge_b) % n, edge_a.max(edge_b) % n);
    if a == b {
        return None;
    }
    // Arc P: vertices a+1 ..= b, arc Q: vertices b+1 ..= a+n. Both include
    // their endpoints, which the symmetry must fix.
    let len_p = b - a;
    let len_q = n - len_p;
    let (first, count) = if len_p >= len_q {
        (a + 1, len_p)
    } else {
        (b + 1, len_q)
    };
    let p = poly.vertex(first);
    let q = poly.vertex(first + count - 1);
    if g.apply(isub(q, p)) != isub(q, p) {
        return None;
    }
    if count <= 2 {
        // No interior vertices: every stabilizer element acts trivially.
        return Some(PivotProposal {
            indices: Vec::new(),
            new_pos: Vec::new(),
        });
    }
    let interior: Vec<usize> = (first + 1..first + count - 1).map(|i| i % n).collect();
    let old_set: HashSet<IVec> = interior.iter().map(|&i| poly.vertex(i)).collect();
    let mut new_pos = Vec::with_capacity(interior.len());
    for &i in &interior {
        let image = iadd(p, g.apply(isub(poly.vertex(i), p)));
        if poly.is_occupied(image) && !old_set.contains(&image) {
            return None;
        }
        new_pos.push(image);
    }
    // Images are isometric copies of distinct points, hence distinct among
    // themselves; only collisions with the fixed part needed checking.
    Some(PivotProposal {
        indices: interior,
        new_pos,
    })
}

pub(crate) fn apply_pivot(poly: &mut LatticePolygon, proposal: &PivotProposal) {
    poly.replace_range(&proposal.indices, &proposal.new_pos);
    #[cfg(debug_assertions)]
    poly.debug_validate();
}

pub(crate) fn random_pivot_proposal<R: Rng>(
    poly: &LatticePolygon,
    rng: &mut R,
) -> Option<PivotProposal> {
    let n = poly.len();
    if n < 6 {
        return None;
    }
    let edge_a = rng.gen_range(0..n);
    let shifted = rng.gen_range(0..n - 1);
    let edge_b = if shifted >= edge_a {
        shifted + 1
    } else {
        shifted
    };
    let (a, b) = (edge_a.min(edge_b), edge_a.max(edge_b));
    let len_p = b - a;
    let (first, count) = if len_p >= n - len_p {
        (a + 1, len_p)
    } else {
        (b + 1, n - len_p)
    };
    let axis = isub(poly.vertex(first + count - 1), poly.vertex(first));
    let stab = stabilizer(axis);
    let g = stab[rng.gen_range(0..stab.len())];
    propose_pivot_with(poly, a, b, g)
}

/// Propose and, when feasible, apply one pivot move.
///
/// Requires N >= 6. Pivots do not preserve the knot class; callers must
/// verify topology and roll back on mismatch.
pub fn pivot_move<R: Rng>(poly: &mut LatticePolygon, rng: &mut R) -> MoveOutcome {
    match random_pivot_proposal(poly, rng) {
        Some(p) => {
            apply_pivot(poly, &p);
            MoveOutcome {
                accepted: true,
                kind: MoveKind::Pivot,
                delta_length: 0,
            }
        }
        None => MoveOutcome::rejected(MoveKind::Pivot),
    }
}

#[cfg(test)]
pub(crate) fn try_pivot(
    poly: &mut LatticePolygon,
    edge_a: usize,
    edge_b: usize,
    g: &SignedPerm,
) -> bool {
    match propose_pivot_with(poly, edge_a, edge_b, g) {
        Some(p) => {
            apply_pivot(poly, &p);
            true
        }
        None => false,
    }
}
