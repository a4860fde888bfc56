//! Self-avoiding polygons on the cubic lattice and the Monte Carlo moves
//! acting on them.
//!
//! A [`LatticePolygon`] is a closed unit-step cycle in `Z^3` with all vertices
//! distinct. BFACF moves ([`bfacf_move`]) act locally and preserve the knot
//! class by construction; pivot moves ([`pivot_move`]) act non-locally and may
//! change it, so callers are expected to verify topology and roll back via
//! [`capture`]/[`restore`].

mod moves;
mod seeds;

pub(crate) use moves::{
    apply_bfacf, apply_pivot, random_bfacf_proposal, random_pivot_proposal, BfacfProposal,
};
pub use moves::{bfacf_move, pivot_move, MoveKind, MoveOutcome};
#[cfg(test)]
pub(crate) use moves::{try_flip, try_grow, try_shrink};
pub use seeds::{load_seed_polygon, parse_seed_text, KnotClass, ParseLabelError, SeedError};

use crate::geometry::PolygonalCurve;
use crate::vec3::{isub, IVec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use thiserror::Error;

/// Seedable counter-based generator used by every chain. ChaCha streams give
/// cheap independent substreams keyed by `(seed, stream)`.
pub type ChainRng = ChaCha8Rng;

/// Build the RNG for a chain, keyed by a global seed and a chain id.
pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Error, PartialEq)]
pub enum PolygonError {
    #[error("polygon must have at least 4 vertices, got {0}")]
    TooShort(usize),
    #[error("polygon length must be even, got {0}")]
    OddLength(usize),
    #[error("step from vertex {0} is not a unit lattice step")]
    NotClosed(usize),
    #[error("vertex {0} coincides with an earlier vertex")]
    SelfIntersection(usize),
    #[error("jitter amplitude {0} outside [0, 0.5)")]
    AmplitudeOutOfRange(f64),
}

/// Closed self-avoiding unit-step polygon in the cubic lattice.
///
/// Invariants (enforced at construction and preserved by all moves):
/// consecutive vertices differ by a unit step (cyclically), all vertices are
/// distinct, and the vertex count is even and at least 4.
#[derive(Debug, Clone)]
pub struct LatticePolygon {
    vertices: Vec<IVec>,
    occupied: HashSet<IVec>,
}

impl PartialEq for LatticePolygon {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}
impl Eq for LatticePolygon {}

/// True iff all vertices in the list are distinct.
///
/// Expected O(N) via hashing.
pub fn check_self_avoiding(vertices: &[IVec]) -> bool {
    let mut seen = HashSet::with_capacity(vertices.len());
    vertices.iter().all(|v| seen.insert(*v))
}

impl LatticePolygon {
    pub fn from_vertices(vertices: Vec<IVec>) -> Result<Self, PolygonError> {
        let n = vertices.len();
        if n < 4 {
            return Err(PolygonError::TooShort(n));
        }
        if n % 2 != 0 {
            return Err(PolygonError::OddLength(n));
        }
        for i in 0..n {
            let step = isub(vertices[(i + 1) % n], vertices[i]);
            if !crate::vec3::is_unit_step(step) {
                return Err(PolygonError::NotClosed(i));
            }
        }
        let mut occupied = HashSet::with_capacity(n);
        for (i, v) in vertices.iter().enumerate() {
            if !occupied.insert(*v) {
                return Err(PolygonError::SelfIntersection(i));
            }
        }
        Ok(Self { vertices, occupied })
    }

    pub fn vertices(&self) -> &[IVec] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Re-checks the self-avoidance invariant on the current vertex list.
    pub fn is_self_avoiding(&self) -> bool {
        check_self_avoiding(&self.vertices)
    }

    pub(crate) fn is_occupied(&self, p: IVec) -> bool {
        self.occupied.contains(&p)
    }

    pub fn vertex(&self, i: usize) -> IVec {
        self.vertices[i % self.vertices.len()]
    }

    /// Direction of the edge leaving vertex `i` (cyclic).
    pub fn edge_dir(&self, i: usize) -> IVec {
        let n = self.vertices.len();
        isub(self.vertices[(i + 1) % n], self.vertices[i % n])
    }

    /// Mirror image: reflection through the x = 0 plane.
    pub fn mirror(&self) -> Self {
        let vertices: Vec<IVec> = self.vertices.iter().map(|v| [-v[0], v[1], v[2]]).collect();
        Self::from_vertices(vertices).expect("mirror preserves polygon invariants")
    }

    pub fn translate(&self, d: IVec) -> Self {
        let vertices: Vec<IVec> = self
            .vertices
            .iter()
            .map(|v| crate::vec3::iadd(*v, d))
            .collect();
        Self::from_vertices(vertices).expect("translation preserves polygon invariants")
    }

    /// Exact f64 embedding of the lattice polygon (no displacement).
    pub fn to_curve(&self) -> PolygonalCurve {
        let pts = self
            .vertices
            .iter()
            .map(|v| [v[0] as f64, v[1] as f64, v[2] as f64])
            .collect();
        PolygonalCurve::from_vertices(pts).expect("lattice polygon is a valid curve")
    }

    /// Displace every vertex by an independent uniform vector in
    /// `[-amplitude, amplitude]^3`, drawn from a stream derived from `seed`.
    ///
    /// Amplitudes below 0.5 keep all vertex pairs at distance at least
    /// `1 - 2*amplitude*sqrt(3)`, so self-avoidance and topology are preserved.
    pub fn to_offlattice(&self, amplitude: f64, seed: u64) -> Result<PolygonalCurve, PolygonError> {
        if !(0.0..0.5).contains(&amplitude) {
            return Err(PolygonError::AmplitudeOutOfRange(amplitude));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let pts = self
            .vertices
            .iter()
            .map(|v| {
                let mut p = [v[0] as f64, v[1] as f64, v[2] as f64];
                for c in &mut p {
                    *c += rng.gen_range(-1.0..=1.0) * amplitude;
                }
                p
            })
            .collect();
        Ok(PolygonalCurve::from_vertices(pts).expect("jitter below 0.5 keeps vertices distinct"))
    }

    // Mutation helpers used by the move implementations. They must uphold the
    // occupancy set invariant.

    pub(crate) fn insert_pair(&mut self, after_edge: usize, a: IVec, b: IVec) {
        debug_assert!(!self.occupied.contains(&a) && !self.occupied.contains(&b));
        self.occupied.insert(a);
        self.occupied.insert(b);
        let at = (after_edge + 1) % self.vertices.len();
        self.vertices.splice(at..at, [a, b]);
    }

    pub(crate) fn remove_pair(&mut self, first: usize) {
        let n = self.vertices.len();
        let i = first % n;
        let j = (first + 1) % n;
        self.occupied.remove(&self.vertices[i]);
        self.occupied.remove(&self.vertices[j]);
        if j > i {
            self.vertices.drain(i..=j);
        } else {
            // Wrapped pair: remove last then first.
            self.vertices.remove(i);
            self.vertices.remove(j);
        }
    }

    pub(crate) fn move_vertex(&mut self, i: usize, to: IVec) {
        debug_assert!(!self.occupied.contains(&to));
        let i = i % self.vertices.len();
        self.occupied.remove(&self.vertices[i]);
        self.occupied.insert(to);
        self.vertices[i] = to;
    }

    pub(crate) fn replace_range(&mut self, indices: &[usize], new_pos: &[IVec]) {
        debug_assert_eq!(indices.len(), new_pos.len());
        for &i in indices {
            self.occupied.remove(&self.vertices[i]);
        }
        for (&i, &p) in indices.iter().zip(new_pos) {
            debug_assert!(!self.occupied.contains(&p));
            self.occupied.insert(p);
            self.vertices[i] = p;
        }
    }

    #[cfg(debug_assertions)]
    pub(crate) fn debug_validate(&self) {
        let n = self.vertices.len();
        assert!(n >= 4 && n % 2 == 0);
        assert_eq!(self.occupied.len(), n);
        for i in 0..n {
            assert!(
                crate::vec3::is_unit_step(self.edge_dir(i)),
                "edge {i} not unit"
            );
            assert!(self.occupied.contains(&self.vertices[i]));
        }
    }
}

/// Snapshot of a polygon together with the RNG state at capture time.
///
/// Restoring reproduces both bit-exactly, so a restored chain replays the
/// same trajectory as an uninterrupted one.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    polygon: LatticePolygon,
    rng: ChainRng,
}

pub fn capture(polygon: &LatticePolygon, rng: &ChainRng) -> Checkpoint {
    Checkpoint {
        polygon: polygon.clone(),
        rng: rng.clone(),
    }
}

pub fn restore(checkpoint: &Checkpoint) -> (LatticePolygon, ChainRng) {
    (checkpoint.polygon.clone(), checkpoint.rng.clone())
}

impl Checkpoint {
    pub fn polygon(&self) -> &LatticePolygon {
        &self.polygon
    }
}
