//! Biased Markov chain over lattice polygons.
//!
//! A chain interleaves BFACF moves with pivot batches. Every proposal is
//! screened by the flat-histogram bias on the configured functional; pivot
//! batches are bracketed by a checkpoint and a topology verification, and
//! roll back in full (polygon, RNG, bias, functional cache) on mismatch.
//! Configurations are saved when they sit at the target length, their bin
//! quota is open, and the decorrelation stride has elapsed; every save is
//! re-verified before export.

use super::bias::{BiasFunctional, BiasSpec, BiasState, OutOfRangePolicy};
use crate::geometry::{
    functional_vector, FunctionalVector, PolygonalCurve, ENTANGLEMENT_DISTANCE,
    ENTANGLEMENT_SEPARATION,
};
use crate::lattice::{self, ChainRng, KnotClass, LatticePolygon, MoveKind, MoveOutcome, SeedError};
use crate::topology::{verify_knot_class, ProjectionError};
use crate::vec3::{FVec, IVec};
use rand::Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("seed: {0}")]
    Seed(#[from] SeedError),
    #[error("projection: {0}")]
    Projection(#[from] ProjectionError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("incompatible shards: {0}")]
    IncompatibleShards(String),
    #[error("jitter: {0}")]
    Jitter(#[from] lattice::PolygonError),
}

/// Full configuration of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub knot: KnotClass,
    pub target_n: usize,
    pub bias: BiasSpec,
    pub policy: OutOfRangePolicy,
    pub seed: u64,
    pub chain_id: u64,
    /// Total records this chain should produce (spread over bins).
    pub records_target: usize,
    /// Pivot proposals per batch; 0 disables pivots entirely.
    pub pivot_batch: usize,
    /// BFACF moves between consecutive pivot batches.
    pub bfacf_per_pivot: usize,
    pub max_moves: u64,
    pub jitter: f64,
    /// Accepted moves required between saves; 0 selects 25 * target_n
    /// (measured to push the lag-1 autocorrelation of the gyration radius
    /// across consecutive saves below 0.1).
    pub decorrelation_stride: u64,
    /// Length cap; 0 selects target_n.
    pub max_length: usize,
    /// BFACF topology audit cadence in moves.
    pub audit_every: u64,
    /// Keep running after quotas fill until the ln f schedule completes and
    /// the accumulated histogram is flat.
    pub require_flat: bool,
    /// Emit progress lines to stderr.
    pub progress: bool,
}

impl ChainConfig {
    pub fn new(knot: KnotClass, target_n: usize, records_target: usize) -> Self {
        ChainConfig {
            knot,
            target_n,
            bias: BiasSpec::default_writhe(),
            policy: OutOfRangePolicy::Reject,
            seed: 0,
            chain_id: 0,
            records_target,
            pivot_batch: 10,
            bfacf_per_pivot: 100,
            max_moves: 50_000_000,
            jitter: 0.1,
            decorrelation_stride: 0,
            max_length: 0,
            audit_every: 1000,
            require_flat: false,
            progress: false,
        }
    }

    fn effective_stride(&self) -> u64 {
        if self.decorrelation_stride == 0 {
            25 * self.target_n as u64
        } else {
            self.decorrelation_stride
        }
    }

    fn effective_max_length(&self) -> usize {
        if self.max_length == 0 {
            self.target_n
        } else {
            self.max_length
        }
    }

    fn validate(&self) -> Result<(), SamplerError> {
        if self.target_n < 4 || self.target_n % 2 != 0 {
            return Err(SamplerError::InvalidConfig(format!(
                "target length must be even and at least 4, got {}",
                self.target_n
            )));
        }
        if !(0.0..0.5).contains(&self.jitter) {
            return Err(SamplerError::InvalidConfig(format!(
                "jitter must lie in [0, 0.5), got {}",
                self.jitter
            )));
        }
        if self.effective_max_length() < self.target_n {
            return Err(SamplerError::InvalidConfig(
                "length cap below target length".into(),
            ));
        }
        if self.pivot_batch > 0 && self.bfacf_per_pivot == 0 {
            return Err(SamplerError::InvalidConfig(
                "pivot batches require a positive BFACF stride".into(),
            ));
        }
        Ok(())
    }
}

/// One exported configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedRecord {
    pub id: usize,
    pub label: KnotClass,
    pub curve: PolygonalCurve,
    pub functionals: FunctionalVector,
    pub seed: u64,
    pub chain_id: u64,
    pub move_index: u64,
}

/// Output of one chain.
#[derive(Debug, Clone)]
pub struct DatasetShard {
    pub records: Vec<SavedRecord>,
    pub target_n: usize,
    pub bias: BiasSpec,
    pub complete: bool,
    pub moves: u64,
    pub rollbacks: u64,
    pub final_flatness: f64,
    pub schedule_complete: bool,
    pub saved_per_bin: Vec<u32>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn record_jitter_seed(seed: u64, chain_id: u64, record_index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(chain_id ^ splitmix64(record_index)))
}

// ---------------------------------------------------------------------------
// Functional trackers
// ---------------------------------------------------------------------------

fn fvec(v: IVec) -> FVec {
    [v[0] as f64, v[1] as f64, v[2] as f64]
}

fn solid_angle_latt(a1: IVec, a2: IVec, b1: IVec, b2: IVec) -> f64 {
    crate::geometry::segment_pair_solid_angle(fvec(a1), fvec(a2), fvec(b1), fvec(b2)).0
}

/// Incrementally maintained writhe matrix of the lattice polygon; serves both
/// the writhe (signed sum) and ACN (absolute sum) functionals.
#[derive(Debug, Clone)]
struct WritheTracker {
    acn: bool,
    n: usize,
    matrix: Vec<f64>,
    sum: f64,
    abs_sum: f64,
    pending: Option<Pending>,
}

#[derive(Debug, Clone)]
enum Pending {
    /// Flip of one vertex: two recomputed rows (full length, zero on
    /// self/adjacent).
    Flip {
        rows: [Vec<f64>; 2],
        segs: [usize; 2],
        sum: f64,
        abs_sum: f64,
    },
    /// Grow at `edge`: three new rows indexed in the grown layout.
    Grow {
        edge: usize,
        rows: [Vec<f64>; 3],
        sum: f64,
        abs_sum: f64,
    },
    /// Shrink at `vertex`: one new row indexed in the shrunk layout.
    Shrink {
        vertex: usize,
        row: Vec<f64>,
        sum: f64,
        abs_sum: f64,
    },
    /// Arbitrary rearrangement: recompute in full on commit.
    Full { sum: f64, abs_sum: f64 },
}

impl Pending {
    fn sums(&self) -> (f64, f64) {
        match self {
            Pending::Flip { sum, abs_sum, .. }
            | Pending::Grow { sum, abs_sum, .. }
            | Pending::Shrink { sum, abs_sum, .. }
            | Pending::Full { sum, abs_sum } => (*sum, *abs_sum),
        }
    }
}

/// Raw ordered-pair sums of the solid-angle matrix for a vertex list.
fn full_sums(vertices: &[IVec]) -> (f64, f64) {
    let n = vertices.len();
    let mut sum = 0.0;
    let mut abs = 0.0;
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let w = solid_angle_latt(
                vertices[i],
                vertices[(i + 1) % n],
                vertices[j],
                vertices[(j + 1) % n],
            );
            sum += 2.0 * w;
            abs += 2.0 * w.abs();
        }
    }
    (sum, abs)
}

fn adjacent(n: usize, a: usize, b: usize) -> bool {
    let diff = (a as isize - b as isize).rem_euclid(n as isize) as usize;
    diff == 0 || diff == 1 || diff == n - 1
}

impl WritheTracker {
    fn new(poly: &LatticePolygon, acn: bool) -> Self {
        let mut t = WritheTracker {
            acn,
            n: 0,
            matrix: Vec::new(),
            sum: 0.0,
            abs_sum: 0.0,
            pending: None,
        };
        t.recompute(poly);
        t
    }

    fn recompute(&mut self, poly: &LatticePolygon) {
        let v = poly.vertices();
        let n = v.len();
        self.n = n;
        self.matrix.clear();
        self.matrix.resize(n * n, 0.0);
        let mut sum = 0.0;
        let mut abs = 0.0;
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let w = solid_angle_latt(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]);
                self.matrix[i * n + j] = w;
                self.matrix[j * n + i] = w;
                sum += 2.0 * w;
                abs += 2.0 * w.abs();
            }
        }
        self.sum = sum;
        self.abs_sum = abs;
        self.pending = None;
    }

    fn value(&self) -> f64 {
        if self.acn {
            self.abs_sum / (4.0 * PI)
        } else {
            self.sum / (4.0 * PI)
        }
    }

    /// Row of segment `s` against all other segments of the vertex list
    /// (zeros on self and adjacents).
    fn row_for(vertices: &[IVec], s: usize) -> Vec<f64> {
        let n = vertices.len();
        let mut row = vec![0.0; n];
        for j in 0..n {
            if adjacent(n, s, j) {
                continue;
            }
            row[j] = solid_angle_latt(
                vertices[s],
                vertices[(s + 1) % n],
                vertices[j],
                vertices[(j + 1) % n],
            );
        }
        row
    }

    /// Evaluate a BFACF proposal, caching the refreshed rows for commit.
    fn evaluate_bfacf(&mut self, poly: &LatticePolygon, p: &lattice::BfacfProposal) -> f64 {
        let v = poly.vertices();
        let n = self.n;
        debug_assert_eq!(v.len(), n);
        let pending = match *p {
            lattice::BfacfProposal::Flip { vertex, to } => {
                let s0 = (vertex + n - 1) % n;
                let s1 = vertex;
                let mut scratch: Vec<IVec> = v.to_vec();
                scratch[vertex] = to;
                let r0 = Self::row_for(&scratch, s0);
                let r1 = Self::row_for(&scratch, s1);
                let mut dsum = 0.0;
                let mut dabs = 0.0;
                for j in 0..n {
                    if !adjacent(n, s0, j) && j != s1 {
                        let old = self.matrix[s0 * n + j];
                        dsum += 2.0 * (r0[j] - old);
                        dabs += 2.0 * (r0[j].abs() - old.abs());
                    }
                    if !adjacent(n, s1, j) && j != s0 {
                        let old = self.matrix[s1 * n + j];
                        dsum += 2.0 * (r1[j] - old);
                        dabs += 2.0 * (r1[j].abs() - old.abs());
                    }
                }
                // The (s0, s1) pair is adjacent, hence zero on both sides;
                // pairs (s0, j) and (s1, j) are disjoint sets, so no double
                // counting occurs.
                Pending::Flip {
                    rows: [r0, r1],
                    segs: [s0, s1],
                    sum: self.sum + dsum,
                    abs_sum: self.abs_sum + dabs,
                }
            }
            lattice::BfacfProposal::Grow { edge, a, b } => {
                let m = n + 2;
                let mut grown: Vec<IVec> = Vec::with_capacity(m);
                grown.extend_from_slice(&v[..=edge]);
                grown.push(a);
                grown.push(b);
                grown.extend_from_slice(&v[edge + 1..]);
                let r0 = Self::row_for(&grown, edge);
                let r1 = Self::row_for(&grown, edge + 1);
                let r2 = Self::row_for(&grown, edge + 2);
                // Remove old row `edge`, add the three new rows. Map old
                // indices to grown indices to pull unchanged-pair terms from
                // the new rows.
                let mut dsum = 0.0;
                let mut dabs = 0.0;
                for j in 0..n {
                    if adjacent(n, edge, j) {
                        continue;
                    }
                    let old = self.matrix[edge * n + j];
                    dsum -= 2.0 * old;
                    dabs -= 2.0 * old.abs();
                }
                let map = |j: usize| if j <= edge { j } else { j + 2 };
                for j in 0..n {
                    if j == edge {
                        continue;
                    }
                    let g = map(j);
                    for (s, row) in [(edge, &r0), (edge + 1, &r1), (edge + 2, &r2)] {
                        if !adjacent(m, s, g) {
                            dsum += 2.0 * row[g];
                            dabs += 2.0 * row[g].abs();
                        }
                    }
                }
                // Internal non-adjacent pair of the detour.
                dsum += 2.0 * r0[edge + 2];
                dabs += 2.0 * r0[edge + 2].abs();
                Pending::Grow {
                    edge,
                    rows: [r0, r1, r2],
                    sum: self.sum + dsum,
                    abs_sum: self.abs_sum + dabs,
                }
            }
            lattice::BfacfProposal::Shrink { vertex } => {
                let m = n - 2;
                let mut shrunk: Vec<IVec> = Vec::with_capacity(m);
                let r1 = (vertex + 1) % n;
                let r2 = (vertex + 2) % n;
                for (j, vv) in v.iter().enumerate() {
                    if j != r1 && j != r2 {
                        shrunk.push(*vv);
                    }
                }
                // Index of the merged segment in the shrunk layout: the
                // segment leaving `vertex`.
                let removed_before = (r1 < vertex) as usize + (r2 < vertex) as usize;
                let new_seg = vertex - removed_before;
                let row = Self::row_for(&shrunk, new_seg);
                let mut dsum = 0.0;
                let mut dabs = 0.0;
                // Drop the three old rows (vertex, vertex+1, vertex+2) and
                // their internal pair (vertex, vertex+2).
                for s in [vertex, r1, r2] {
                    for j in 0..n {
                        if adjacent(n, s, j) || j == vertex || j == r1 || j == r2 {
                            continue;
                        }
                        let old = self.matrix[s * n + j];
                        dsum -= 2.0 * old;
                        dabs -= 2.0 * old.abs();
                    }
                }
                let internal = self.matrix[vertex * n + r2];
                dsum -= 2.0 * internal;
                dabs -= 2.0 * internal.abs();
                for (g, _) in shrunk.iter().enumerate() {
                    if !adjacent(m, new_seg, g) {
                        dsum += 2.0 * row[g];
                        dabs += 2.0 * row[g].abs();
                    }
                }
                Pending::Shrink {
                    vertex,
                    row,
                    sum: self.sum + dsum,
                    abs_sum: self.abs_sum + dabs,
                }
            }
        };
        let (s, _) = pending.sums();
        let value = if self.acn {
            pending.sums().1 / (4.0 * PI)
        } else {
            s / (4.0 * PI)
        };
        self.pending = Some(pending);
        value
    }

    /// Evaluate an arbitrary candidate vertex list (pivot proposals).
    fn evaluate_full(&mut self, vertices: &[IVec]) -> f64 {
        let (sum, abs_sum) = full_sums(vertices);
        self.pending = Some(Pending::Full { sum, abs_sum });
        if self.acn {
            abs_sum / (4.0 * PI)
        } else {
            sum / (4.0 * PI)
        }
    }

    /// Commit the cached pending update; `poly` is the polygon after the
    /// move was applied.
    fn commit(&mut self, poly: &LatticePolygon) {
        let pending = self.pending.take().expect("commit without evaluation");
        match pending {
            Pending::Flip {
                rows,
                segs,
                sum,
                abs_sum,
            } => {
                let n = self.n;
                for (s, row) in segs.iter().zip(rows.iter()) {
                    for j in 0..n {
                        self.matrix[s * n + j] = row[j];
                        self.matrix[j * n + s] = row[j];
                    }
                }
                self.sum = sum;
                self.abs_sum = abs_sum;
            }
            Pending::Grow {
                edge,
                rows,
                sum,
                abs_sum,
            } => {
                let n = self.n;
                let m = n + 2;
                let map = |j: usize| if j <= edge { j } else { j + 2 };
                let mut next = vec![0.0; m * m];
                for i in 0..n {
                    if i == edge {
                        continue;
                    }
                    let gi = map(i);
                    for j in 0..n {
                        if j == edge {
                            continue;
                        }
                        next[gi * m + map(j)] = self.matrix[i * n + j];
                    }
                }
                for (s, row) in [(edge, &rows[0]), (edge + 1, &rows[1]), (edge + 2, &rows[2])] {
                    for j in 0..m {
                        next[s * m + j] = row[j];
                        next[j * m + s] = row[j];
                    }
                }
                self.matrix = next;
                self.n = m;
                self.sum = sum;
                self.abs_sum = abs_sum;
            }
            Pending::Shrink {
                vertex,
                row,
                sum,
                abs_sum,
            } => {
                let n = self.n;
                let m = n - 2;
                let r1 = (vertex + 1) % n;
                let r2 = (vertex + 2) % n;
                let mut map = Vec::with_capacity(m);
                for j in 0..n {
                    if j != r1 && j != r2 {
                        map.push(j);
                    }
                }
                let mut next = vec![0.0; m * m];
                for (gi, &oi) in map.iter().enumerate() {
                    for (gj, &oj) in map.iter().enumerate() {
                        next[gi * m + gj] = self.matrix[oi * n + oj];
                    }
                }
                let removed_before = (r1 < vertex) as usize + (r2 < vertex) as usize;
                let new_seg = vertex - removed_before;
                for j in 0..m {
                    next[new_seg * m + j] = row[j];
                    next[j * m + new_seg] = row[j];
                }
                self.matrix = next;
                self.n = m;
                self.sum = sum;
                self.abs_sum = abs_sum;
            }
            Pending::Full { .. } => {
                self.recompute(poly);
            }
        }
        debug_assert_eq!(self.n, poly.len());
    }

    fn discard(&mut self) {
        self.pending = None;
    }
}

/// Entanglement-count tracker; cheap enough to recompute per proposal.
#[derive(Debug, Clone)]
struct EntTracker {
    count: usize,
    pending: Option<usize>,
}

fn entanglement_count(vertices: &[IVec]) -> usize {
    let n = vertices.len();
    let d2 = ENTANGLEMENT_DISTANCE * ENTANGLEMENT_DISTANCE;
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = (vertices[i][0] - vertices[j][0]) as f64;
            let dy = (vertices[i][1] - vertices[j][1]) as f64;
            let dz = (vertices[i][2] - vertices[j][2]) as f64;
            if dx * dx + dy * dy + dz * dz >= d2 {
                continue;
            }
            let q = j - i;
            if q.min(n - q) > ENTANGLEMENT_SEPARATION {
                count += 1;
            }
        }
    }
    count
}

impl EntTracker {
    fn new(poly: &LatticePolygon) -> Self {
        EntTracker {
            count: entanglement_count(poly.vertices()),
            pending: None,
        }
    }

    fn evaluate(&mut self, vertices: &[IVec]) -> f64 {
        let c = entanglement_count(vertices);
        self.pending = Some(c);
        c as f64
    }

    fn commit(&mut self) {
        self.count = self.pending.take().expect("commit without evaluation");
    }

    fn discard(&mut self) {
        self.pending = None;
    }

    fn value(&self) -> f64 {
        self.count as f64
    }
}

#[derive(Debug, Clone)]
enum Tracker {
    None,
    Writhe(WritheTracker),
    Entanglement(EntTracker),
}

impl Tracker {
    fn new(poly: &LatticePolygon, functional: BiasFunctional) -> Self {
        match functional {
            BiasFunctional::None => Tracker::None,
            BiasFunctional::Writhe => Tracker::Writhe(WritheTracker::new(poly, false)),
            BiasFunctional::Acn => Tracker::Writhe(WritheTracker::new(poly, true)),
            BiasFunctional::Entanglement => Tracker::Entanglement(EntTracker::new(poly)),
        }
    }

    fn value(&self) -> f64 {
        match self {
            Tracker::None => 0.0,
            Tracker::Writhe(t) => t.value(),
            Tracker::Entanglement(t) => t.value(),
        }
    }

    fn evaluate_bfacf(&mut self, poly: &LatticePolygon, p: &lattice::BfacfProposal) -> f64 {
        match self {
            Tracker::None => 0.0,
            Tracker::Writhe(t) => t.evaluate_bfacf(poly, p),
            Tracker::Entanglement(t) => {
                let mut scratch: Vec<IVec> = poly.vertices().to_vec();
                match *p {
                    lattice::BfacfProposal::Flip { vertex, to } => scratch[vertex] = to,
                    lattice::BfacfProposal::Grow { edge, a, b } => {
                        scratch.splice(edge + 1..edge + 1, [a, b]);
                    }
                    lattice::BfacfProposal::Shrink { vertex } => {
                        let n = scratch.len();
                        let r1 = (vertex + 1) % n;
                        let r2 = (vertex + 2) % n;
                        let mut keep = Vec::with_capacity(n - 2);
                        for (j, v) in scratch.iter().enumerate() {
                            if j != r1 && j != r2 {
                                keep.push(*v);
                            }
                        }
                        scratch = keep;
                    }
                }
                t.evaluate(&scratch)
            }
        }
    }

    fn evaluate_vertices(&mut self, vertices: &[IVec]) -> f64 {
        match self {
            Tracker::None => 0.0,
            Tracker::Writhe(t) => t.evaluate_full(vertices),
            Tracker::Entanglement(t) => t.evaluate(vertices),
        }
    }

    fn commit(&mut self, poly_after: &LatticePolygon) {
        match self {
            Tracker::None => {}
            Tracker::Writhe(t) => t.commit(poly_after),
            Tracker::Entanglement(t) => t.commit(),
        }
    }

    fn discard(&mut self) {
        match self {
            Tracker::None => {}
            Tracker::Writhe(t) => t.discard(),
            Tracker::Entanglement(t) => t.discard(),
        }
    }

    fn resync(&mut self, poly: &LatticePolygon) {
        match self {
            Tracker::None => {}
            Tracker::Writhe(t) => t.recompute(poly),
            Tracker::Entanglement(t) => t.count = entanglement_count(poly.vertices()),
        }
    }
}

// ---------------------------------------------------------------------------
// Chain state
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Snapshot {
    poly: LatticePolygon,
    rng: ChainRng,
    bias: BiasState,
    current_value: f64,
    current_bin: Option<usize>,
    accepted_moves: u64,
}

/// Live Markov chain: polygon, RNG, bias, functional cache, and the save log.
#[derive(Debug)]
pub struct ChainState {
    config: ChainConfig,
    poly: LatticePolygon,
    rng: ChainRng,
    bias: BiasState,
    tracker: Tracker,
    current_value: f64,
    current_bin: Option<usize>,
    move_index: u64,
    accepted_moves: u64,
    bfacf_since_pivot: usize,
    last_save_at: Option<u64>,
    records: Vec<SavedRecord>,
    rollbacks: u64,
    checkpoint: Snapshot,
    accepted_since_resync: u64,
}

impl ChainState {
    pub fn new(config: ChainConfig) -> Result<Self, SamplerError> {
        config.validate()?;
        let poly = lattice::load_seed_polygon(config.knot)?;
        let rng = lattice::chain_rng(config.seed, config.chain_id);
        let bias = BiasState::new(config.bias.clone(), config.records_target, config.policy);
        let tracker = Tracker::new(&poly, config.bias.functional);
        let current_value = tracker.value();
        let current_bin = bias.bin_of(current_value);
        let checkpoint = Snapshot {
            poly: poly.clone(),
            rng: rng.clone(),
            bias: bias.clone(),
            current_value,
            current_bin,
            accepted_moves: 0,
        };
        Ok(ChainState {
            config,
            poly,
            rng,
            bias,
            tracker,
            current_value,
            current_bin,
            move_index: 0,
            accepted_moves: 0,
            bfacf_since_pivot: 0,
            last_save_at: None,
            records: Vec::new(),
            rollbacks: 0,
            checkpoint,
            accepted_since_resync: 0,
        })
    }

    pub fn polygon(&self) -> &LatticePolygon {
        &self.poly
    }

    pub fn bias(&self) -> &BiasState {
        &self.bias
    }

    pub fn records(&self) -> &[SavedRecord] {
        &self.records
    }

    pub fn move_index(&self) -> u64 {
        self.move_index
    }

    pub fn rollbacks(&self) -> u64 {
        self.rollbacks
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            poly: self.poly.clone(),
            rng: self.rng.clone(),
            bias: self.bias.clone(),
            current_value: self.current_value,
            current_bin: self.current_bin,
            accepted_moves: self.accepted_moves,
        }
    }

    fn restore_snapshot(&mut self, snap: &Snapshot) {
        self.poly = snap.poly.clone();
        self.rng = snap.rng.clone();
        self.bias = snap.bias.clone();
        self.current_value = snap.current_value;
        self.current_bin = snap.current_bin;
        self.accepted_moves = snap.accepted_moves;
        self.tracker.resync(&self.poly);
    }

    /// One BFACF proposal screened by the bias.
    pub fn bfacf_step(&mut self) -> MoveOutcome {
        self.move_index += 1;
        let (kind, proposal) = lattice::random_bfacf_proposal(
            &self.poly,
            &mut self.rng,
            self.config.effective_max_length(),
        );
        let rejected = MoveOutcome {
            accepted: false,
            kind,
            delta_length: 0,
        };
        let Some(p) = proposal else {
            self.visit_current();
            return rejected;
        };
        let new_value = self.tracker.evaluate_bfacf(&self.poly, &p);
        if !self.decide(new_value) {
            self.tracker.discard();
            self.visit_current();
            return rejected;
        }
        let delta = p.delta_length();
        lattice::apply_bfacf(&mut self.poly, &p);
        self.tracker.commit(&self.poly);
        self.after_accept(new_value);
        MoveOutcome {
            accepted: true,
            kind,
            delta_length: delta,
        }
    }

    /// Bias decision for a proposed functional value.
    ///
    /// While the chain has not yet entered the binned range it walks freely;
    /// once inside, out-of-range proposals are rejected (under the reject
    /// policy) and in-range ones face the flat-histogram ratio.
    fn decide(&mut self, new_value: f64) -> bool {
        match (self.current_bin, self.bin_for(new_value)) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(old), Some(new_bin)) => {
                let a = self.bias.accept_probability(old, new_bin);
                a >= 1.0 || self.rng.gen::<f64>() < a
            }
        }
    }

    /// One pivot proposal screened by the bias (no topology check here; the
    /// caller brackets batches with verification).
    fn pivot_step(&mut self) -> MoveOutcome {
        self.move_index += 1;
        let rejected = MoveOutcome {
            accepted: false,
            kind: MoveKind::Pivot,
            delta_length: 0,
        };
        if self.poly.len() < 6 {
            self.visit_current();
            return rejected;
        }
        let Some(p) = lattice::random_pivot_proposal(&self.poly, &mut self.rng) else {
            self.visit_current();
            return rejected;
        };
        let mut candidate: Vec<IVec> = self.poly.vertices().to_vec();
        for (&i, &pos) in p.indices.iter().zip(&p.new_pos) {
            candidate[i] = pos;
        }
        let new_value = self.tracker.evaluate_vertices(&candidate);
        if !self.decide(new_value) {
            self.tracker.discard();
            self.visit_current();
            return rejected;
        }
        lattice::apply_pivot(&mut self.poly, &p);
        self.tracker.commit(&self.poly);
        self.after_accept(new_value);
        MoveOutcome {
            accepted: true,
            kind: MoveKind::Pivot,
            delta_length: 0,
        }
    }

    fn bin_for(&self, value: f64) -> Option<usize> {
        if matches!(self.config.bias.functional, BiasFunctional::None) {
            Some(0)
        } else {
            self.bias.bin_of(value)
        }
    }

    fn after_accept(&mut self, value: f64) {
        self.current_value = value;
        self.current_bin = self.bin_for(value);
        self.accepted_moves += 1;
        self.accepted_since_resync += 1;
        if let Some(bin) = self.current_bin {
            self.bias.record_visit(bin);
        }
        if self.accepted_since_resync >= 20_000 {
            // Guard against slow drift of the incremental sums.
            self.tracker.resync(&self.poly);
            self.current_value = self.tracker.value();
            self.accepted_since_resync = 0;
        }
    }

    fn visit_current(&mut self) {
        if let Some(bin) = self.current_bin {
            self.bias.record_visit(bin);
        }
    }

    /// Run one pivot batch bracketed by checkpoint and verification. Returns
    /// true if the batch was kept, false when rolled back.
    pub fn pivot_batch(&mut self) -> Result<bool, SamplerError> {
        if self.config.pivot_batch == 0 || self.poly.len() < 6 {
            return Ok(true);
        }
        let snap = self.snapshot();
        let mut any_accepted = false;
        for _ in 0..self.config.pivot_batch {
            if self.pivot_step().accepted {
                any_accepted = true;
            }
        }
        if !any_accepted {
            self.checkpoint = self.snapshot();
            return Ok(true);
        }
        let result = verify_knot_class(&self.poly, self.config.knot)?;
        if result.matches(self.config.knot) {
            self.checkpoint = self.snapshot();
            Ok(true)
        } else {
            self.restore_snapshot(&snap);
            self.rollbacks += 1;
            Ok(false)
        }
    }

    /// Next scheduled unit: a pivot batch when due, otherwise one BFACF move.
    pub fn mc_step(&mut self) -> Result<MoveOutcome, SamplerError> {
        if self.config.pivot_batch > 0 && self.bfacf_since_pivot >= self.config.bfacf_per_pivot {
            self.bfacf_since_pivot = 0;
            let kept = self.pivot_batch()?;
            return Ok(MoveOutcome {
                accepted: kept,
                kind: MoveKind::Pivot,
                delta_length: 0,
            });
        }
        self.bfacf_since_pivot += 1;
        let out = self.bfacf_step();
        if self.config.audit_every > 0 && self.move_index % self.config.audit_every == 0 {
            self.audit()?;
        }
        Ok(out)
    }

    /// Safety audit: verify topology and roll back to the last verified
    /// checkpoint on mismatch. BFACF moves preserve topology by construction,
    /// so a rollback here indicates a defect and is counted.
    fn audit(&mut self) -> Result<(), SamplerError> {
        let result = verify_knot_class(&self.poly, self.config.knot)?;
        if result.matches(self.config.knot) {
            self.checkpoint = self.snapshot();
        } else {
            let snap = self.checkpoint.clone();
            self.restore_snapshot(&snap);
            self.rollbacks += 1;
        }
        Ok(())
    }

    fn stride_ok(&self) -> bool {
        match self.last_save_at {
            None => true,
            Some(at) => self.accepted_moves.saturating_sub(at) >= self.config.effective_stride(),
        }
    }

    /// Save the current configuration when the gate opens.
    fn try_save(&mut self) -> Result<bool, SamplerError> {
        let Some(bin) = self.current_bin else {
            return Ok(false);
        };
        if !self
            .bias
            .should_save(bin, self.poly.len(), self.config.target_n)
            || !self.stride_ok()
        {
            return Ok(false);
        }
        let result = verify_knot_class(&self.poly, self.config.knot)?;
        if !result.matches(self.config.knot) {
            // Should be unreachable outside pivot batches; recover anyway.
            let snap = self.checkpoint.clone();
            self.restore_snapshot(&snap);
            self.rollbacks += 1;
            return Ok(false);
        }
        let record_index = self.records.len() as u64;
        let jitter_seed = record_jitter_seed(self.config.seed, self.config.chain_id, record_index);
        let curve = self
            .poly
            .to_offlattice(self.config.jitter, jitter_seed)?
            .centered();
        let functionals = functional_vector(&curve, None);
        self.records.push(SavedRecord {
            id: self.records.len(),
            label: self.config.knot,
            curve,
            functionals,
            seed: self.config.seed,
            chain_id: self.config.chain_id,
            move_index: self.move_index,
        });
        self.bias.mark_saved(bin);
        self.last_save_at = Some(self.accepted_moves);
        Ok(true)
    }

    fn goals_met(&self) -> bool {
        self.bias.all_quotas_filled()
            && (!self.config.require_flat
                || (self.bias.schedule_complete()
                    && self.bias.flatness() >= super::bias::FLATNESS_THRESHOLD))
    }

    fn finish(self) -> DatasetShard {
        DatasetShard {
            complete: self.goals_met(),
            target_n: self.config.target_n,
            bias: self.config.bias.clone(),
            moves: self.move_index,
            rollbacks: self.rollbacks,
            final_flatness: self.bias.flatness(),
            schedule_complete: self.bias.schedule_complete(),
            saved_per_bin: self.bias.saved_per_bin().to_vec(),
            records: self.records,
        }
    }
}

/// Drive one chain to completion: quotas filled or move budget exhausted.
pub fn run_chain(config: &ChainConfig) -> Result<DatasetShard, SamplerError> {
    let mut st = ChainState::new(config.clone())?;
    let progress_every = 200_000;
    while !st.goals_met() && st.move_index < config.max_moves {
        st.mc_step()?;
        st.try_save()?;
        if config.progress && st.move_index % progress_every == 0 {
            eprintln!(
                "chain={} moves={} bins_filled={}/{} lnf={}",
                config.chain_id,
                st.move_index,
                st.bias.bins_filled(),
                st.bias.bins(),
                st.bias.ln_f()
            );
        }
    }
    if config.progress {
        eprintln!(
            "chain={} moves={} bins_filled={}/{} lnf={} done={}",
            config.chain_id,
            st.move_index,
            st.bias.bins_filled(),
            st.bias.bins(),
            st.bias.ln_f(),
            st.bias.all_quotas_filled()
        );
    }
    Ok(st.finish())
}

/// Run several chains in parallel; results are ordered by chain id.
pub fn run_chains(configs: &[ChainConfig]) -> Result<Vec<DatasetShard>, SamplerError> {
    use rayon::prelude::*;
    configs
        .par_iter()
        .map(run_chain)
        .collect::<Result<Vec<_>, _>>()
}
