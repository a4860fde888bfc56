//! Flat-histogram bias over a chosen geometric functional.
//!
//! The bias keeps a log-weight per bin and adds `ln f` to a bin's weight on
//! every visit, favoring unvisited regions. When the visit histogram is flat
//! (min >= 0.8 * mean), `ln f` halves and the histogram resets; the schedule
//! ends at the floor 1e-3, after which the histogram accumulates without
//! resets so the final flatness is observable.

use std::fmt;
use std::str::FromStr;

/// Functional the sampler biases on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasFunctional {
    /// Total space writhe of the lattice polygon.
    Writhe,
    /// Average crossing number.
    Acn,
    /// Long-range entanglement count.
    Entanglement,
    /// No bias: plain geometric acceptance.
    None,
}

impl fmt::Display for BiasFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BiasFunctional::Writhe => "writhe",
            BiasFunctional::Acn => "acn",
            BiasFunctional::Entanglement => "entanglement",
            BiasFunctional::None => "none",
        };
        write!(f, "{s}")
    }
}

impl FromStr for BiasFunctional {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "writhe" => Ok(BiasFunctional::Writhe),
            "acn" => Ok(BiasFunctional::Acn),
            "entanglement" => Ok(BiasFunctional::Entanglement),
            "none" => Ok(BiasFunctional::None),
            other => Err(format!(
                "unknown bias functional {other:?} (expected writhe|acn|entanglement|none)"
            )),
        }
    }
}

/// Bin layout of a bias: `bins` equal-width bins over [lo, hi).
#[derive(Debug, Clone, PartialEq)]
pub struct BiasSpec {
    pub functional: BiasFunctional,
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl BiasSpec {
    pub fn none() -> Self {
        BiasSpec {
            functional: BiasFunctional::None,
            lo: 0.0,
            hi: 1.0,
            bins: 1,
        }
    }

    /// Default from the sampler design: writhe over [-10, 10] in 0.5-wide
    /// bins.
    pub fn default_writhe() -> Self {
        BiasSpec {
            functional: BiasFunctional::Writhe,
            lo: -10.0,
            hi: 10.0,
            bins: 40,
        }
    }
}

/// Treatment of proposals whose functional value falls outside the bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutOfRangePolicy {
    /// Zero acceptance (default).
    #[default]
    Reject,
    /// Clamp into the nearest edge bin.
    Extend,
}

pub const LN_F_INITIAL: f64 = 1.0;
pub const LN_F_FLOOR: f64 = 1e-3;
pub const FLATNESS_THRESHOLD: f64 = 0.8;

/// Flat-histogram state: visit counts, log-weights, modification factor, and
/// per-bin save bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasState {
    spec: BiasSpec,
    policy: OutOfRangePolicy,
    visits: Vec<u64>,
    log_weights: Vec<f64>,
    ln_f: f64,
    saved: Vec<u32>,
    quota: Vec<u32>,
    visits_since_check: u64,
    schedule_complete: bool,
}

impl BiasState {
    /// Build a bias with the total save quota spread evenly over the bins
    /// (ceil division, so totals land within one bin-count of the target).
    pub fn new(spec: BiasSpec, total_quota: usize, policy: OutOfRangePolicy) -> Self {
        assert!(spec.bins >= 1, "bias needs at least one bin");
        assert!(spec.hi > spec.lo, "bias range must be non-empty");
        let bins = spec.bins;
        let per_bin = total_quota.div_ceil(bins) as u32;
        BiasState {
            spec,
            policy,
            visits: vec![0; bins],
            log_weights: vec![0.0; bins],
            ln_f: LN_F_INITIAL,
            saved: vec![0; bins],
            quota: vec![per_bin; bins],
            visits_since_check: 0,
            schedule_complete: false,
        }
    }

    pub fn spec(&self) -> &BiasSpec {
        &self.spec
    }

    pub fn ln_f(&self) -> f64 {
        self.ln_f
    }

    pub fn bins(&self) -> usize {
        self.spec.bins
    }

    pub fn visits(&self) -> &[u64] {
        &self.visits
    }

    pub fn saved_per_bin(&self) -> &[u32] {
        &self.saved
    }

    pub fn quota_per_bin(&self) -> &[u32] {
        &self.quota
    }

    /// Bin index of a functional value, or None when out of range under the
    /// reject policy.
    pub fn bin_of(&self, value: f64) -> Option<usize> {
        if !value.is_finite() {
            return None;
        }
        let width = (self.spec.hi - self.spec.lo) / self.spec.bins as f64;
        let raw = (value - self.spec.lo) / width;
        if raw < 0.0 || value >= self.spec.hi {
            return match self.policy {
                OutOfRangePolicy::Reject => None,
                OutOfRangePolicy::Extend => Some(if raw < 0.0 { 0 } else { self.spec.bins - 1 }),
            };
        }
        Some((raw as usize).min(self.spec.bins - 1))
    }

    /// Flat-histogram acceptance: min(1, exp(w_old - w_new)).
    pub fn accept_probability(&self, old_bin: usize, new_bin: usize) -> f64 {
        let d = self.log_weights[old_bin] - self.log_weights[new_bin];
        if d >= 0.0 {
            1.0
        } else {
            d.exp()
        }
    }

    /// Record a visit: bump the count, add ln f to the bin weight, and halve
    /// ln f whenever the histogram is flat.
    pub fn record_visit(&mut self, bin: usize) {
        self.visits[bin] += 1;
        self.log_weights[bin] += self.ln_f;
        if self.schedule_complete {
            return;
        }
        self.visits_since_check += 1;
        // Flatness can only newly hold after every bin gained visits; a
        // cheap cadence keeps this O(1) amortized.
        if self.visits_since_check >= self.spec.bins as u64 {
            self.visits_since_check = 0;
            if self.flatness() >= FLATNESS_THRESHOLD {
                self.ln_f /= 2.0;
                if self.ln_f < LN_F_FLOOR {
                    self.ln_f = LN_F_FLOOR;
                    self.schedule_complete = true;
                } else {
                    self.visits.iter_mut().for_each(|v| *v = 0);
                }
            }
        }
    }

    /// min/mean ratio of the current visit histogram (0 when any bin is
    /// unvisited).
    pub fn flatness(&self) -> f64 {
        let min = *self.visits.iter().min().unwrap() as f64;
        let mean = self.visits.iter().sum::<u64>() as f64 / self.visits.len() as f64;
        if mean == 0.0 {
            0.0
        } else {
            min / mean
        }
    }

    /// True once the ln f schedule has reached its floor.
    pub fn schedule_complete(&self) -> bool {
        self.schedule_complete
    }

    /// Save gate: the configuration must sit at the target length and the
    /// bin's quota must be open. Decorrelation striding is enforced by the
    /// chain on top of this.
    pub fn should_save(&self, bin: usize, current_n: usize, target_n: usize) -> bool {
        current_n == target_n && self.saved[bin] < self.quota[bin]
    }

    pub fn mark_saved(&mut self, bin: usize) {
        debug_assert!(self.saved[bin] < self.quota[bin]);
        self.saved[bin] += 1;
    }

    pub fn bins_filled(&self) -> usize {
        self.saved
            .iter()
            .zip(&self.quota)
            .filter(|(s, q)| s >= q)
            .count()
    }

    pub fn total_saved(&self) -> usize {
        self.saved.iter().map(|&s| s as usize).sum()
    }

    pub fn all_quotas_filled(&self) -> bool {
        self.bins_filled() == self.spec.bins
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn flat_bias(bins: usize) -> BiasState {
        BiasState::new(
            BiasSpec {
                functional: BiasFunctional::Writhe,
                lo: -10.0,
                hi: 10.0,
                bins,
            },
            100,
            OutOfRangePolicy::Reject,
        )
    }

    #[test]
    fn bin_lookup() {
        let b = flat_bias(40);
        assert_eq!(b.bin_of(-10.0), Some(0));
        assert_eq!(b.bin_of(-9.51), Some(0));
        assert_eq!(b.bin_of(0.0), Some(20));
        assert_eq!(b.bin_of(9.99), Some(39));
        assert_eq!(b.bin_of(10.0), None);
        assert_eq!(b.bin_of(-10.01), None);
        assert_eq!(b.bin_of(f64::NAN), None);
    }

    #[test]
    fn extend_policy_clamps() {
        let mut b = flat_bias(10);
        b.policy = OutOfRangePolicy::Extend;
        assert_eq!(b.bin_of(-50.0), Some(0));
        assert_eq!(b.bin_of(50.0), Some(9));
    }

    #[test]
    fn acceptance_formula() {
        let mut b = flat_bias(4);
        assert_eq!(b.accept_probability(0, 1), 1.0);
        // Raise bin 1 by ln 2: acceptance into it should be exactly 0.5.
        b.log_weights[1] = 2.0_f64.ln();
        assert!((b.accept_probability(0, 1) - 0.5).abs() < 1e-15);
        assert_eq!(b.accept_probability(1, 0), 1.0);
    }

    #[test]
    fn acceptance_matches_scalar_oracle() {
        let mut b = flat_bias(16);
        let mut rng = crate::lattice::chain_rng(5, 5);
        for w in b.log_weights.iter_mut() {
            *w = rng.gen_range(-3.0..3.0);
        }
        for _ in 0..200 {
            let i = rng.gen_range(0..16);
            let j = rng.gen_range(0..16);
            let oracle = (b.log_weights[i] - b.log_weights[j]).exp().min(1.0);
            assert!((b.accept_probability(i, j) - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn single_visit_updates_count_and_weight() {
        let mut b = flat_bias(4);
        b.record_visit(2);
        assert_eq!(b.visits()[2], 1);
        assert!((b.log_weights[2] - LN_F_INITIAL).abs() < 1e-15);
    }

    #[test]
    fn uniform_visits_halve_ln_f_once() {
        let mut b = flat_bias(8);
        // A perfectly uniform sweep triggers exactly one halving (histogram
        // resets afterwards).
        for bin in 0..8 {
            b.record_visit(bin);
        }
        assert!((b.ln_f() - 0.5).abs() < 1e-15);
        assert!(b.visits().iter().all(|&v| v == 0));
        for bin in 0..8 {
            b.record_visit(bin);
        }
        assert!((b.ln_f() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn schedule_floor_stops_resets() {
        let mut b = flat_bias(2);
        for _ in 0..16 {
            b.record_visit(0);
            b.record_visit(1);
        }
        assert!(b.schedule_complete());
        assert!((b.ln_f() - LN_F_FLOOR).abs() < 1e-15);
        // Histogram now accumulates.
        b.record_visit(0);
        b.record_visit(1);
        assert!(b.visits().iter().all(|&v| v > 0));
    }

    #[test]
    fn double_well_walk_reaches_flatness() {
        // Toy Metropolis walk on a double-well functional f(x) = (x^2-9)^2
        // over x in [-5, 5]; the bias must flatten visits across bins that a
        // plain walk would avoid.
        let spec = BiasSpec {
            functional: BiasFunctional::Writhe,
            lo: -5.0,
            hi: 5.0,
            bins: 20,
        };
        let mut bias = BiasState::new(spec, 0, OutOfRangePolicy::Reject);
        let mut rng = crate::lattice::chain_rng(9, 9);
        let mut x: f64 = 3.0;
        let mut bin = bias.bin_of(x).unwrap();
        for _ in 0..400_000 {
            let step: f64 = rng.gen_range(-0.5..0.5);
            let y = x + step;
            if let Some(nb) = bias.bin_of(y) {
                if rng.gen::<f64>() < bias.accept_probability(bin, nb) {
                    x = y;
                    bin = nb;
                }
            }
            bias.record_visit(bin);
            if bias.schedule_complete() {
                break;
            }
        }
        assert!(bias.schedule_complete(), "schedule did not complete");
        // Continue accumulating after the schedule to measure final flatness.
        for _ in 0..200_000 {
            let step: f64 = rng.gen_range(-0.5..0.5);
            let y = x + step;
            if let Some(nb) = bias.bin_of(y) {
                if rng.gen::<f64>() < bias.accept_probability(bin, nb) {
                    x = y;
                    bin = nb;
                }
            }
            bias.record_visit(bin);
        }
        assert!(
            bias.flatness() >= FLATNESS_THRESHOLD,
            "final flatness {} below threshold",
            bias.flatness()
        );
    }

    #[test]
    fn quota_accounting() {
        let b = BiasState::new(
            BiasSpec {
                functional: BiasFunctional::Writhe,
                lo: 0.0,
                hi: 1.0,
                bins: 7,
            },
            1000,
            OutOfRangePolicy::Reject,
        );
        let total: u32 = b.quota_per_bin().iter().sum();
        assert!(total as usize >= 1000 && (total as usize) < 1000 + 7);
    }

    #[test]
    fn save_gate() {
        let mut b = flat_bias(4);
        // flat_bias quota: ceil(100/4) = 25 per bin.
        assert!(b.should_save(1, 100, 100));
        assert!(!b.should_save(1, 98, 100));
        for _ in 0..25 {
            assert!(b.should_save(1, 100, 100));
            b.mark_saved(1);
        }
        assert!(!b.should_save(1, 100, 100));
        assert_eq!(b.bins_filled(), 1);
    }
}
