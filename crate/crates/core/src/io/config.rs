//! Run configuration: the sampling pipeline's knobs, buildable from a plain
//! key=value file, CLI flags, or both (flags win).

use super::IoFormatError;
use crate::lattice::KnotClass;
use crate::sampler::{BiasFunctional, BiasSpec, ChainConfig, OutOfRangePolicy};
use std::path::PathBuf;

/// Parse a LO:HI:COUNT bin layout.
pub fn parse_bins(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected LO:HI:COUNT, got {s:?}"));
    }
    let lo: f64 = parts[0].parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| format!("bad HI: {e}"))?;
    let count: usize = parts[2].parse().map_err(|e| format!("bad COUNT: {e}"))?;
    if !(hi > lo) || count == 0 {
        return Err(format!(
            "bins must satisfy LO < HI and COUNT >= 1, got {s:?}"
        ));
    }
    Ok((lo, hi, count))
}

/// Full sampling-run specification: chain parameters plus orchestration.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub knot: KnotClass,
    pub n_vertices: usize,
    /// Total records across all chains.
    pub count: usize,
    pub bias: BiasFunctional,
    pub bins: (f64, f64, usize),
    pub chains: usize,
    pub seed: u64,
    pub jitter: f64,
    pub out: PathBuf,
    pub max_moves: u64,
    pub pivot_batch: usize,
    pub bfacf_per_pivot: usize,
    pub decorrelation_stride: u64,
    pub max_length: usize,
    pub extend_range: bool,
    pub progress: bool,
}

impl RunSpec {
    pub fn new(knot: KnotClass, out: PathBuf) -> Self {
        RunSpec {
            knot,
            n_vertices: 100,
            count: 1000,
            bias: BiasFunctional::Writhe,
            bins: (-10.0, 10.0, 40),
            chains: 1,
            seed: 0,
            jitter: 0.1,
            out,
            max_moves: 50_000_000,
            pivot_batch: 10,
            bfacf_per_pivot: 100,
            decorrelation_stride: 0,
            max_length: 0,
            extend_range: false,
            progress: true,
        }
    }

    /// Apply key=value lines; unknown keys error, '#' starts a comment.
    pub fn apply_config_text(&mut self, text: &str, origin: &str) -> Result<(), IoFormatError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| IoFormatError::Parse {
                path: origin.to_string(),
                line: idx + 1,
                msg: "expected key=value".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |msg: String| IoFormatError::Parse {
                path: origin.to_string(),
                line: idx + 1,
                msg,
            };
            match key {
                "knot" => self.knot = value.parse().map_err(|e| bad(format!("{e}")))?,
                "n_vertices" => {
                    self.n_vertices = value
                        .parse()
                        .map_err(|e| bad(format!("bad n_vertices: {e}")))?
                }
                "count" => {
                    self.count = value.parse().map_err(|e| bad(format!("bad count: {e}")))?
                }
                "bias" => self.bias = value.parse().map_err(bad)?,
                "bins" => self.bins = parse_bins(value).map_err(bad)?,
                "chains" => {
                    self.chains = value.parse().map_err(|e| bad(format!("bad chains: {e}")))?
                }
                "seed" => self.seed = value.parse().map_err(|e| bad(format!("bad seed: {e}")))?,
                "jitter" => {
                    self.jitter = value.parse().map_err(|e| bad(format!("bad jitter: {e}")))?
                }
                "out" => self.out = PathBuf::from(value),
                "max_moves" => {
                    self.max_moves = value
                        .parse()
                        .map_err(|e| bad(format!("bad max_moves: {e}")))?
                }
                "pivot_batch" => {
                    self.pivot_batch = value
                        .parse()
                        .map_err(|e| bad(format!("bad pivot_batch: {e}")))?
                }
                "bfacf_per_pivot" => {
                    self.bfacf_per_pivot = value
                        .parse()
                        .map_err(|e| bad(format!("bad bfacf_per_pivot: {e}")))?
                }
                "decorrelation_stride" => {
                    self.decorrelation_stride = value
                        .parse()
                        .map_err(|e| bad(format!("bad decorrelation_stride: {e}")))?
                }
                "max_length" => {
                    self.max_length = value
                        .parse()
                        .map_err(|e| bad(format!("bad max_length: {e}")))?
                }
                "extend_range" => {
                    self.extend_range = value
                        .parse()
                        .map_err(|e| bad(format!("bad extend_range: {e}")))?
                }
                "progress" => {
                    self.progress = value
                        .parse()
                        .map_err(|e| bad(format!("bad progress: {e}")))?
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(())
    }

    /// Per-chain configurations: the record count is split evenly and each
    /// chain gets its id as the RNG stream.
    pub fn chain_configs(&self) -> Result<Vec<ChainConfig>, IoFormatError> {
        if self.chains == 0 {
            return Err(IoFormatError::Config("chains must be at least 1".into()));
        }
        if self.count == 0 {
            return Err(IoFormatError::Config("count must be at least 1".into()));
        }
        let per_chain = self.count.div_ceil(self.chains);
        let (lo, hi, bins) = self.bins;
        Ok((0..self.chains as u64)
            .map(|chain_id| {
                let mut c = ChainConfig::new(self.knot, self.n_vertices, per_chain);
                c.bias = match self.bias {
                    BiasFunctional::None => BiasSpec::none(),
                    functional => BiasSpec {
                        functional,
                        lo,
                        hi,
                        bins,
                    },
                };
                c.policy = if self.extend_range {
                    OutOfRangePolicy::Extend
                } else {
                    OutOfRangePolicy::Reject
                };
                c.seed = self.seed;
                c.chain_id = chain_id;
                c.max_moves = self.max_moves;
                c.jitter = self.jitter;
                c.pivot_batch = self.pivot_batch;
                c.bfacf_per_pivot = self.bfacf_per_pivot;
                c.decorrelation_stride = self.decorrelation_stride;
                c.max_length = self.max_length;
                c.progress = self.progress;
                c
            })
            .collect())
    }
}
