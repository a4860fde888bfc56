//! kNN mutual-information estimator for a continuous feature against a
//! discrete label.
//!
//! For each sample, take the distance to its k-th nearest neighbor among
//! same-label samples, count how many samples of any label fall strictly
//! inside that radius (the sample itself included), and combine with digamma
//! terms: I = psi(N) - <psi(N_label)> + psi(k) - <psi(m)>. Exact ties are
//! broken by deterministic micro-noise so results are reproducible.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProbeError {
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("need at least 2 distinct labels")]
    SingleClass,
    #[error("label class {label} has {size} members; k = {k} requires more")]
    ClassTooSmall { label: usize, size: usize, k: usize },
    #[error("k must be at least 1")]
    BadK,
    #[error("feature {0:?} not present")]
    UnknownFeature(String),
    #[error("row {0} has a non-finite feature value")]
    NonFinite(usize),
    #[error("accuracy denominator must be positive")]
    ZeroAccuracy,
    #[error("accuracy {0} outside [0, 1]")]
    BadAccuracy(f64),
    #[error("empty split: {0}")]
    EmptySplit(&'static str),
}

/// Digamma function for positive arguments: upward recurrence into the
/// asymptotic region, then the standard series.
pub(crate) fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut result = 0.0;
    while x < 12.0 {
        result -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    result + x.ln()
        - 0.5 * inv
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)))
}

/// Amplitude of the deterministic tie-breaking noise relative to the value
/// spread.
const TIE_NOISE: f64 = 1e-10;

/// Mutual information in nats between a scalar feature and discrete labels.
///
/// The estimate is clamped at zero. Labels are arbitrary small integers; the
/// estimator needs every class to have more than `k` members.
pub fn knn_mi(values: &[f64], labels: &[usize], k: usize) -> Result<f64, ProbeError> {
    let n = values.len();
    if k == 0 {
        return Err(ProbeError::BadK);
    }
    if n < 10 {
        return Err(ProbeError::TooFewSamples { min: 10, got: n });
    }
    assert_eq!(n, labels.len(), "values and labels must align");
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(ProbeError::NonFinite(i));
        }
    }
    let classes: Vec<usize> = {
        let mut c: Vec<usize> = labels.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    };
    if classes.len() < 2 {
        return Err(ProbeError::SingleClass);
    }
    let mut class_sizes = vec![0usize; classes.len()];
    let class_index = |label: usize| classes.binary_search(&label).unwrap();
    for &l in labels {
        class_sizes[class_index(l)] += 1;
    }
    for (ci, &size) in class_sizes.iter().enumerate() {
        if size <= k {
            return Err(ProbeError::ClassTooSmall {
                label: classes[ci],
                size,
                k,
            });
        }
    }

    // Deterministic tie-break: micro-noise scaled to the spread. Constant
    // features fall back to a unit scale so the noise still separates them.
    let spread = {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > 0.0 {
            hi - lo
        } else {
            hi.abs().max(1.0)
        }
    };
    let noisy: Vec<f64> = {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x11e_b4ea_u64);
        values
            .iter()
            .map(|&v| v + rng.gen_range(-1.0..1.0) * TIE_NOISE * spread)
            .collect()
    };

    // Global sorted order for radius counting.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| noisy[a].partial_cmp(&noisy[b]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| noisy[i]).collect();

    // Per-class sorted values and each sample's rank within its class.
    let mut per_class: Vec<Vec<f64>> = vec![Vec::new(); classes.len()];
    let mut class_rank = vec![0usize; n];
    for &i in &order {
        let ci = class_index(labels[i]);
        class_rank[i] = per_class[ci].len();
        per_class[ci].push(noisy[i]);
    }

    let mut psi_m_sum = 0.0;
    let mut psi_label_sum = 0.0;
    for i in 0..n {
        let ci = class_index(labels[i]);
        let class_vals = &per_class[ci];
        let rank = class_rank[i];
        // k-th nearest same-class neighbor by two-pointer window expansion.
        let (mut lo, mut hi) = (rank, rank);
        for _ in 0..k {
            let left = if lo > 0 {
                class_vals[rank] - class_vals[lo - 1]
            } else {
                f64::INFINITY
            };
            let right = if hi + 1 < class_vals.len() {
                class_vals[hi + 1] - class_vals[rank]
            } else {
                f64::INFINITY
            };
            if left <= right {
                lo -= 1;
            } else {
                hi += 1;
            }
        }
        let radius = f64::max(
            class_vals[rank] - class_vals[lo],
            class_vals[hi] - class_vals[rank],
        );
        // Count samples of any label strictly within the radius (self
        // included at distance zero).
        let v = noisy[i];
        let left = sorted.partition_point(|&x| x <= v - radius);
        let right = sorted.partition_point(|&x| x < v + radius);
        let m = right.saturating_sub(left).max(1);
        psi_m_sum += digamma(m as f64);
        psi_label_sum += digamma(class_sizes[ci] as f64);
    }
    let nf = n as f64;
    let mi = digamma(nf) - psi_label_sum / nf + digamma(k as f64) - psi_m_sum / nf;
    Ok(mi.max(0.0))
}
