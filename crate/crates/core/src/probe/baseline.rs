//! Minimal multinomial logistic baseline used to turn probe-flagged features
//! into an accuracy number.
//!
//! Full-batch gradient descent on standardized features with L2 weight decay.
//! The split is 0.8 train, 0.05 validation (reserved), 0.15 test, shuffled by
//! a seeded generator; standardization statistics come from the training
//! split only.

use super::mi::ProbeError;
use super::LabeledFeatureTable;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct BaselineHyper {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub split_seed: u64,
}

impl Default for BaselineHyper {
    fn default() -> Self {
        BaselineHyper {
            learning_rate: 0.5,
            epochs: 400,
            l2: 1e-4,
            split_seed: 0,
        }
    }
}

/// Fitted classifier plus its held-out test accuracy.
#[derive(Debug, Clone)]
pub struct TrainedBaseline {
    /// Weights: classes x (features + bias).
    weights: Vec<Vec<f64>>,
    feature_mean: Vec<f64>,
    feature_std: Vec<f64>,
    pub classes: usize,
    pub test_accuracy: f64,
}

impl TrainedBaseline {
    pub fn predict(&self, row: &[f64]) -> usize {
        let z: Vec<f64> = standardize(row, &self.feature_mean, &self.feature_std);
        argmax(&scores(&self.weights, &z))
    }
}

fn standardize(row: &[f64], mean: &[f64], std: &[f64]) -> Vec<f64> {
    row.iter()
        .zip(mean.iter().zip(std))
        .map(|(&v, (&m, &s))| (v - m) / s)
        .collect()
}

fn scores(weights: &[Vec<f64>], z: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .map(|w| {
            let (bias, coef) = w.split_last().unwrap();
            coef.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + bias
        })
        .collect()
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn softmax(logits: &mut [f64]) {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - max).exp();
        total += *l;
    }
    for l in logits.iter_mut() {
        *l /= total;
    }
}

/// Train on the selected feature columns and report held-out accuracy.
pub fn train_baseline(
    table: &LabeledFeatureTable,
    columns: &[usize],
    hyper: &BaselineHyper,
) -> Result<TrainedBaseline, ProbeError> {
    let n = table.rows.len();
    if n < 20 {
        return Err(ProbeError::TooFewSamples { min: 20, got: n });
    }
    let classes = table.class_count();
    if classes < 2 {
        return Err(ProbeError::SingleClass);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.split_seed);
    order.shuffle(&mut rng);
    let train_end = (0.8 * n as f64).floor() as usize;
    let val_end = train_end + (0.05 * n as f64).floor() as usize;
    let (train_idx, test_idx) = (&order[..train_end], &order[val_end..]);
    if train_idx.is_empty() {
        return Err(ProbeError::EmptySplit("train"));
    }
    if test_idx.is_empty() {
        return Err(ProbeError::EmptySplit("test"));
    }
    let train_classes: std::collections::BTreeSet<usize> =
        train_idx.iter().map(|&i| table.labels[i]).collect();
    if train_classes.len() < 2 {
        return Err(ProbeError::SingleClass);
    }

    let f = columns.len();
    let fetch = |i: usize| -> Vec<f64> { columns.iter().map(|&c| table.rows[i][c]).collect() };

    // Standardization on the training split only.
    let mut mean = vec![0.0; f];
    for &i in train_idx {
        for (m, v) in mean.iter_mut().zip(fetch(i)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= train_idx.len() as f64;
    }
    let mut std = vec![0.0; f];
    for &i in train_idx {
        for ((s, &m), v) in std.iter_mut().zip(&mean).zip(fetch(i)) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut std {
        *s = (*s / train_idx.len() as f64).sqrt();
        if *s < 1e-12 {
            *s = 1.0; // constant feature carries no signal either way
        }
    }

    let x_train: Vec<Vec<f64>> = train_idx
        .iter()
        .map(|&i| standardize(&fetch(i), &mean, &std))
        .collect();
    let y_train: Vec<usize> = train_idx.iter().map(|&i| table.labels[i]).collect();

    let mut weights = vec![vec![0.0; f + 1]; classes];
    let m = x_train.len() as f64;
    for _ in 0..hyper.epochs {
        let mut grad = vec![vec![0.0; f + 1]; classes];
        for (x, &y) in x_train.iter().zip(&y_train) {
            let mut p = scores(&weights, x);
            softmax(&mut p);
            for (c, pc) in p.iter().enumerate() {
                let err = pc - if c == y { 1.0 } else { 0.0 };
                let g = &mut grad[c];
                for (gk, xk) in g[..f].iter_mut().zip(x) {
                    *gk += err * xk;
                }
                g[f] += err;
            }
        }
        for (w, g) in weights.iter_mut().zip(&grad) {
            for k in 0..=f {
                let decay = if k < f { hyper.l2 * w[k] } else { 0.0 };
                w[k] -= hyper.learning_rate * (g[k] / m + decay);
            }
        }
    }

    let model = TrainedBaseline {
        weights,
        feature_mean: mean,
        feature_std: std,
        classes,
        test_accuracy: 0.0,
    };
    let correct = test_idx
        .iter()
        .filter(|&&i| model.predict(&fetch(i)) == table.labels[i])
        .count();
    Ok(TrainedBaseline {
        test_accuracy: correct as f64 / test_idx.len() as f64,
        ..model
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn table_from(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> LabeledFeatureTable {
        LabeledFeatureTable::new(
            (0..rows[0].len()).map(|i| format!("f{i}")).collect(),
            rows,
            labels,
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn separable_feature_reaches_perfect_accuracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 600;
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let rows: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| vec![l as f64 * 2.0 - 1.0 + rng.gen_range(-0.3..0.3)])
            .collect();
        let model =
            train_baseline(&table_from(rows, labels), &[0], &BaselineHyper::default()).unwrap();
        assert_eq!(model.test_accuracy, 1.0);
    }

    #[test]
    fn noise_features_stay_near_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 4000;
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let model = train_baseline(
            &table_from(rows, labels),
            &[0, 1],
            &BaselineHyper::default(),
        )
        .unwrap();
        assert!(
            (model.test_accuracy - 0.5).abs() <= 0.05,
            "chance-level accuracy expected, got {}",
            model.test_accuracy
        );
    }

    #[test]
    fn training_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 300;
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let rows: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| vec![l as f64 + rng.gen_range(-2.0..2.0)])
            .collect();
        let t = table_from(rows, labels);
        let a = train_baseline(&t, &[0], &BaselineHyper::default()).unwrap();
        let b = train_baseline(&t, &[0], &BaselineHyper::default()).unwrap();
        assert_eq!(a.test_accuracy, b.test_accuracy);
    }

    #[test]
    fn degenerate_single_class_rejected() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64]).collect();
        let t = LabeledFeatureTable::new(vec!["f0".into()], rows, vec![0; 50], vec!["a".into()]);
        assert!(t.is_err());
    }
}
