//! Shortcut-learning diagnostics: per-functional mutual information against
//! labels, ranked probe reports, a linear baseline classifier, and the
//! shortcut index tau = m_a / m.

mod baseline;
mod mi;

pub use baseline::{train_baseline, BaselineHyper, TrainedBaseline};
pub use mi::{knn_mi, ProbeError};

use crate::sampler::Dataset;

/// Feature rows with one discrete label per row.
#[derive(Debug, Clone)]
pub struct LabeledFeatureTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Dense class indices 0..class_count.
    pub labels: Vec<usize>,
    pub label_names: Vec<String>,
}

impl LabeledFeatureTable {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        label_names: Vec<String>,
    ) -> Result<Self, ProbeError> {
        assert_eq!(rows.len(), labels.len(), "rows and labels must align");
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), feature_names.len(), "row {i} width mismatch");
            if !row.iter().all(|v| v.is_finite()) {
                return Err(ProbeError::NonFinite(i));
            }
        }
        let distinct: std::collections::BTreeSet<usize> = labels.iter().copied().collect();
        if distinct.len() < 2 {
            return Err(ProbeError::SingleClass);
        }
        Ok(LabeledFeatureTable {
            feature_names,
            rows,
            labels,
            label_names,
        })
    }

    /// Build from a merged dataset using the standard functional columns.
    pub fn from_dataset(dataset: &Dataset) -> Result<Self, ProbeError> {
        use crate::geometry::FunctionalVector;
        let feature_names = FunctionalVector::NAMES
            .iter()
            .map(|s| s.to_string())
            .collect();
        let rows = dataset
            .records
            .iter()
            .map(|r| r.functionals.as_array().to_vec())
            .collect();
        let labels = dataset
            .records
            .iter()
            .map(|r| match r.label {
                crate::lattice::KnotClass::Unknot => 0,
                crate::lattice::KnotClass::Trefoil => 1,
            })
            .collect();
        Self::new(
            feature_names,
            rows,
            labels,
            vec!["0_1".into(), "3_1".into()],
        )
    }

    pub fn class_count(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    pub fn column_index(&self, name: &str) -> Result<usize, ProbeError> {
        self.feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ProbeError::UnknownFeature(name.to_string()))
    }
}

/// One scored functional in a probe report.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeEntry {
    pub functional: String,
    pub mi_nats: f64,
    /// 1-based rank, descending score, ties broken by name.
    pub rank: usize,
}

/// Ranked mutual-information scores of the probed functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub entries: Vec<ProbeEntry>,
}

impl ProbeReport {
    pub fn score_of(&self, functional: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.functional == functional)
            .map(|e| e.mi_nats)
    }

    /// Functionals scoring above a threshold, in rank order.
    pub fn flagged(&self, threshold: f64) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.mi_nats > threshold)
            .map(|e| e.functional.as_str())
            .collect()
    }
}

/// Score each requested functional against the labels and rank the result.
/// `functionals` = None probes every column.
pub fn shortcut_probe(
    table: &LabeledFeatureTable,
    functionals: Option<&[String]>,
    k: usize,
) -> Result<ProbeReport, ProbeError> {
    let columns: Vec<(String, usize)> = match functionals {
        None => table
            .feature_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect(),
        Some(names) => names
            .iter()
            .map(|n| table.column_index(n).map(|i| (n.clone(), i)))
            .collect::<Result<_, _>>()?,
    };
    let mut entries: Vec<ProbeEntry> = columns
        .into_iter()
        .map(|(name, c)| {
            knn_mi(&table.column(c), &table.labels, k).map(|mi| ProbeEntry {
                functional: name,
                mi_nats: mi,
                rank: 0,
            })
        })
        .collect::<Result<_, _>>()?;
    entries.sort_by(|a, b| {
        b.mi_nats
            .partial_cmp(&a.mi_nats)
            .unwrap()
            .then_with(|| a.functional.cmp(&b.functional))
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    Ok(ProbeReport { entries })
}

/// Shortcut index with the informativeness flag from the accuracy floor.
#[derive(Debug, Clone, PartialEq)]
pub struct TauReport {
    pub m: f64,
    pub m_a: f64,
    pub tau: f64,
    /// False when the full-representation accuracy is at chance level
    /// (m <= 0.55 for binary tasks), where the ratio says nothing.
    pub informative: bool,
}

/// tau = m_a / m: the fraction of full-representation accuracy explained by
/// probe-flagged features alone.
pub fn shortcut_index(m_a: f64, m: f64) -> Result<TauReport, ProbeError> {
    if m == 0.0 {
        return Err(ProbeError::ZeroAccuracy);
    }
    for v in [m, m_a] {
        if !(0.0..=1.0).contains(&v) {
            return Err(ProbeError::BadAccuracy(v));
        }
    }
    Ok(TauReport {
        m,
        m_a,
        tau: m_a / m,
        informative: m > 0.55,
    })
}
