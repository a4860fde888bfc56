//! Biased Markov chains over lattice polygons and dataset assembly.
//!
//! Chains are fully determined by `(seed, chain id, config)`: each owns its
//! polygon, RNG, and bias state, so the orchestrator can run many in parallel
//! and merge shards afterwards without any shared mutable state.

mod bias;
mod chain;

pub use bias::{
    BiasFunctional, BiasSpec, BiasState, OutOfRangePolicy, FLATNESS_THRESHOLD, LN_F_FLOOR,
    LN_F_INITIAL,
};
pub use chain::{
    run_chain, run_chains, ChainConfig, ChainState, DatasetShard, SamplerError, SavedRecord,
};

use crate::lattice::KnotClass;

/// Merged dataset across shards.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub records: Vec<SavedRecord>,
    pub target_n: usize,
    pub bias: BiasSpec,
    pub complete: bool,
    pub unknot_count: usize,
    pub trefoil_count: usize,
    /// Per-bin saved counts summed over shards.
    pub coverage: Vec<u32>,
}

/// Concatenate shards with id re-mapping and combined coverage accounting.
///
/// Shards must agree on target length and bias layout.
pub fn merge_shards(shards: Vec<DatasetShard>) -> Result<Dataset, SamplerError> {
    let Some(first) = shards.first() else {
        return Err(SamplerError::IncompatibleShards("no shards".into()));
    };
    let target_n = first.target_n;
    let bias = first.bias.clone();
    let mut coverage = vec![0u32; bias.bins];
    let mut records = Vec::new();
    let mut complete = true;
    let mut unknot_count = 0;
    let mut trefoil_count = 0;
    for shard in &shards {
        if shard.target_n != target_n {
            return Err(SamplerError::IncompatibleShards(format!(
                "target length {} vs {}",
                shard.target_n, target_n
            )));
        }
        if shard.bias != bias {
            return Err(SamplerError::IncompatibleShards(
                "bias specifications differ".into(),
            ));
        }
        complete &= shard.complete;
        for (c, s) in coverage.iter_mut().zip(&shard.saved_per_bin) {
            *c += s;
        }
        for rec in &shard.records {
            let mut rec = rec.clone();
            rec.id = records.len();
            match rec.label {
                KnotClass::Unknot => unknot_count += 1,
                KnotClass::Trefoil => trefoil_count += 1,
            }
            records.push(rec);
        }
    }
    Ok(Dataset {
        records,
        target_n,
        bias,
        complete,
        unknot_count,
        trefoil_count,
        coverage,
    })
}
