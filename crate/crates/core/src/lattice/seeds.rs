//! Shipped seed configurations, one per supported knot class.
//!
//! Seeds are plain-text files embedded at compile time: line 1 holds the
//! vertex count N, lines 2..N+1 hold space-separated integer coordinates.
//! The trefoil seed is a 24-edge lattice trefoil obtained by shrinking a
//! verified braid closure with topology-preserving BFACF moves (see the
//! ignored `regenerate_trefoil_seed` test); both seeds are re-verified
//! against their knot class at every load.

use super::LatticePolygon;
use crate::topology::Verdict;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Knot classes with shipped seed configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KnotClass {
    Unknot,
    Trefoil,
}

impl KnotClass {
    pub fn all() -> [KnotClass; 2] {
        [KnotClass::Unknot, KnotClass::Trefoil]
    }

    /// Expected Alexander determinant at t = -1.
    pub fn determinant(self) -> i64 {
        match self {
            KnotClass::Unknot => 1,
            KnotClass::Trefoil => 3,
        }
    }

    /// Expected |v2|.
    pub fn v2_abs(self) -> i64 {
        match self {
            KnotClass::Unknot => 0,
            KnotClass::Trefoil => 1,
        }
    }

    pub fn verdict(self) -> Verdict {
        match self {
            KnotClass::Unknot => Verdict::Unknot,
            KnotClass::Trefoil => Verdict::Trefoil,
        }
    }
}

impl fmt::Display for KnotClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotClass::Unknot => write!(f, "0_1"),
            KnotClass::Trefoil => write!(f, "3_1"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown knot class label {0:?} (supported: 0_1, 3_1)")]
pub struct ParseLabelError(pub String);

impl FromStr for KnotClass {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0_1" | "01" | "unknot" => Ok(KnotClass::Unknot),
            "3_1" | "31" | "trefoil" => Ok(KnotClass::Trefoil),
            other => Err(ParseLabelError(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("{0}")]
    UnknownLabel(#[from] ParseLabelError),
    #[error("seed file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("seed polygon invalid: {0}")]
    Polygon(#[from] super::PolygonError),
    #[error("seed failed topology verification: expected {expected}, verdict {got:?}")]
    VerificationFailed { expected: KnotClass, got: Verdict },
    #[error("projection failed while verifying seed: {0}")]
    Projection(#[from] crate::topology::ProjectionError),
}

const SEED_UNKNOT: &str = include_str!("../../data/seed_0_1.txt");
const SEED_TREFOIL: &str = include_str!("../../data/seed_3_1.txt");

/// Parse a seed file body: line 1 = N, lines 2..N+1 = "x y z" integers.
pub fn parse_seed_text(text: &str) -> Result<LatticePolygon, SeedError> {
    let mut lines = text.lines();
    let n: usize = lines
        .next()
        .ok_or(SeedError::Parse {
            line: 1,
            msg: "empty file".into(),
        })?
        .trim()
        .parse()
        .map_err(|e| SeedError::Parse {
            line: 1,
            msg: format!("bad vertex count: {e}"),
        })?;
    let mut vertices = Vec::with_capacity(n);
    for (idx, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut coords = [0i32; 3];
        let mut parts = line.split_whitespace();
        for c in &mut coords {
            *c = parts
                .next()
                .ok_or(SeedError::Parse {
                    line: idx + 2,
                    msg: "expected three integers".into(),
                })?
                .parse()
                .map_err(|e| SeedError::Parse {
                    line: idx + 2,
                    msg: format!("bad coordinate: {e}"),
                })?;
        }
        if parts.next().is_some() {
            return Err(SeedError::Parse {
                line: idx + 2,
                msg: "trailing fields".into(),
            });
        }
        vertices.push(coords);
    }
    if vertices.len() != n {
        return Err(SeedError::Parse {
            line: 1,
            msg: format!("declared {n} vertices, found {}", vertices.len()),
        });
    }
    Ok(LatticePolygon::from_vertices(vertices)?)
}

/// Load the shipped seed for a knot class and re-verify its topology.
pub fn load_seed_polygon(class: KnotClass) -> Result<LatticePolygon, SeedError> {
    let text = match class {
        KnotClass::Unknot => SEED_UNKNOT,
        KnotClass::Trefoil => SEED_TREFOIL,
    };
    let poly = parse_seed_text(text)?;
    let result = crate::topology::classify_polygon(&poly)?;
    if result.verdict != class.verdict() {
        return Err(SeedError::VerificationFailed {
            expected: class,
            got: result.verdict,
        });
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknot_seed_is_the_unit_square() {
        let sq = load_seed_polygon(KnotClass::Unknot).unwrap();
        assert_eq!(sq.vertices(), &[[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]);
    }

    #[test]
    fn unknown_label_is_an_error() {
        let err = "5_2".parse::<KnotClass>().unwrap_err();
        assert_eq!(err.0, "5_2");
    }

    #[test]
    fn label_roundtrip() {
        for class in KnotClass::all() {
            assert_eq!(class.to_string().parse::<KnotClass>().unwrap(), class);
        }
    }

    #[test]
    fn truncated_seed_rejected() {
        let text = "3\n0 0 0\n1 0 0\n";
        assert!(matches!(
            parse_seed_text(text),
            Err(SeedError::Parse { .. })
        ));
    }

    #[test]
    fn trefoil_seed_loads_and_verifies() {
        let tre = load_seed_polygon(KnotClass::Trefoil).unwrap();
        assert!(tre.is_self_avoiding());
        assert_eq!(tre.len() % 2, 0);
    }

    #[test]
    fn trefoil_seed_is_self_avoiding_by_exhaustive_pairs() {
        let tre = load_seed_polygon(KnotClass::Trefoil).unwrap();
        let v = tre.vertices();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                assert_ne!(v[i], v[j], "vertices {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn trefoil_seed_is_minimal_length() {
        // 24 steps is the minimal step number of the trefoil on the cubic
        // lattice.
        let tre = load_seed_polygon(KnotClass::Trefoil).unwrap();
        assert_eq!(tre.len(), 24);
    }

    /// Regenerates data/seed_3_1.txt by shrinking a verified trefoil with
    /// topology-preserving BFACF moves until it reaches the minimal 24 steps.
    /// Run manually: cargo test -p geoknot-core regenerate_trefoil_seed -- --ignored
    #[test]
    #[ignore]
    fn regenerate_trefoil_seed() {
        use crate::lattice::{chain_rng, try_flip, try_grow, try_shrink};
        use crate::topology::Verdict;
        use rand::seq::SliceRandom;
        use rand::Rng;

        let mut poly = load_seed_polygon(KnotClass::Trefoil).unwrap();
        let mut rng = chain_rng(0xdead_beef, 0);
        let mut rounds = 0u64;
        while poly.len() > 24 {
            rounds += 1;
            assert!(rounds < 200_000, "failed to reach 24 steps");
            // Mix locally, then take any available shrink.
            for _ in 0..poly.len() {
                let v = rng.gen_range(0..poly.len());
                try_flip(&mut poly, v);
            }
            let mut sites: Vec<usize> = (0..poly.len()).collect();
            sites.shuffle(&mut rng);
            let mut shrunk = false;
            for v in sites {
                if try_shrink(&mut poly, v) {
                    shrunk = true;
                    break;
                }
            }
            if !shrunk && rng.gen::<f64>() < 0.05 {
                // Escape a local minimum with one temporary extension.
                let e = rng.gen_range(0..poly.len());
                let dirs: [[i32; 3]; 6] = [
                    [1, 0, 0],
                    [-1, 0, 0],
                    [0, 1, 0],
                    [0, -1, 0],
                    [0, 0, 1],
                    [0, 0, -1],
                ];
                let d = dirs[rng.gen_range(0..6)];
                let cap = poly.len() + 2;
                try_grow(&mut poly, e, d, cap);
            }
            if rounds % 5_000 == 0 {
                let r = crate::topology::classify_polygon(&poly).unwrap();
                assert_eq!(r.verdict, Verdict::Trefoil, "topology drifted");
                eprintln!("round {rounds}: N = {}", poly.len());
            }
        }
        let r = crate::topology::classify_polygon(&poly).unwrap();
        assert_eq!(r.verdict, Verdict::Trefoil);
        assert_eq!(r.determinant, 3);

        // Normalize: translate so the minimum corner is at the origin.
        let v = poly.vertices();
        let min = [
            v.iter().map(|p| p[0]).min().unwrap(),
            v.iter().map(|p| p[1]).min().unwrap(),
            v.iter().map(|p| p[2]).min().unwrap(),
        ];
        let poly = poly.translate([-min[0], -min[1], -min[2]]);
        let mut text = format!("{}\n", poly.len());
        for p in poly.vertices() {
            text.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
        }
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/seed_3_1.txt");
        std::fs::write(path, text).unwrap();
        eprintln!("wrote {} ({} vertices)", path, poly.len());
    }
}
