//! Core engine for sampling geometrically broad ensembles of fixed-topology
//! lattice knots and for diagnosing shortcut-learning potential in labeled
//! knot datasets.
//!
//! The crate is organized around six subsystems:
//!
//! - [`lattice`]: self-avoiding lattice polygons, topology-preserving BFACF
//!   moves, non-local pivot moves, checkpoint/rollback, and off-lattice export.
//! - [`geometry`]: geometric functionals of closed polygonal curves (pairwise
//!   distances, writhe matrix, total/lattice writhe, curvature, entanglement,
//!   radius of gyration, peak counts).
//! - [`topology`]: knot-class verification via planar diagrams, the Alexander
//!   determinant, and Vassiliev invariants.
//! - [`sampler`]: flat-histogram biased Markov chains with topology rollback
//!   and quota-driven dataset assembly.
//! - [`probe`]: kNN mutual-information shortcut probe, a linear baseline
//!   classifier, and the shortcut index tau.
//! - [`io`]: text formats (XYZ coordinates, writhe-matrix CSV, dataset
//!   manifests) and run configuration parsing.

pub mod geometry;
pub mod io;
pub mod lattice;
pub mod probe;
pub mod sampler;
pub mod topology;

mod vec3;

pub use geometry::{
    average_crossing_number, functional_vector, lattice_writhe, long_range_entanglement,
    max_pairwise_distance, pairwise_distance_matrix, peak_count, radius_of_gyration,
    sum_pairwise_distances, total_curvature, total_writhe, writhe_matrix, DistanceMatrix,
    FunctionalVector, PolygonalCurve, SeparationMode, WritheMatrix,
};
pub use lattice::{
    bfacf_move, capture, chain_rng, load_seed_polygon, pivot_move, restore, ChainRng, Checkpoint,
    KnotClass, LatticePolygon, MoveKind, MoveOutcome,
};
pub use topology::{
    alexander_determinant, classify_curve, classify_polygon, project_to_diagram,
    vassiliev_v2_exact, vassiliev_v2_writhe, verify_knot_class, KnotDiagram, Verdict,
    VerificationResult,
};
