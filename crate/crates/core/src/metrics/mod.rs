//! ROC and precision-recall analysis for scored binary labels.

mod bootstrap;
mod curves;
mod report;

use thiserror::Error;

pub use bootstrap::{bootstrap_ci, roc_band, BandPoint, BootstrapCI, Metric, MAX_REDRAWS};
pub use curves::{aupr, auroc, pr_curve, roc_curve, trapezoid, PrPoint, RocPoint};
pub use report::{
    threshold_for_sensitivity, threshold_for_specificity, threshold_report, threshold_table, ThresholdReport,
};

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("scores and labels differ in length ({scores} vs {labels})")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("no records to score")]
    Empty,
    #[error("score at index {0} is NaN")]
    NanScore(usize),
    #[error("metric needs both classes present")]
    SingleClass,
    #[error("metric needs at least one positive")]
    NoPositives,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("target {target} cannot be reached at any threshold")]
    TargetUnreachable { target: f64 },
    #[error("every bootstrap resample was single-class")]
    AllResamplesFailed,
}

/// Parallel scores and labels (`true` = positive).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredLabels<T> {
    scores: Vec<T>,
    labels: Vec<bool>,
}

impl<T: Scalar> ScoredLabels<T> {
    pub fn new(scores: Vec<T>, labels: Vec<bool>) -> Result<Self, MetricsError> {
        if scores.len() != labels.len() {
            return Err(MetricsError::LengthMismatch {
                scores: scores.len(),
                labels: labels.len(),
            });
        }
        if scores.is_empty() {
            return Err(MetricsError::Empty);
        }
        if let Some(i) = scores.iter().position(|s| s.is_nan()) {
            return Err(MetricsError::NanScore(i));
        }
        Ok(Self { scores, labels })
    }

    pub fn scores(&self) -> &[T] {
        &self.scores
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn n_negative(&self) -> usize {
        self.len() - self.n_positive()
    }
}

/// Label counts at each distinct score, highest score first.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Groups<T> {
    pub thresholds: Vec<T>,
    pub pos: Vec<u64>,
    pub neg: Vec<u64>,
}

impl<T: Scalar> Groups<T> {
    /// Groups plus, for every record, the index of its group.
    pub fn with_membership(sl: &ScoredLabels<T>) -> (Self, Vec<usize>) {
        let mut order: Vec<usize> = (0..sl.len()).collect();
        order.sort_by(|&a, &b| sl.scores[b].partial_cmp(&sl.scores[a]).expect("scores are not NaN"));
        let mut groups = Groups {
            thresholds: Vec::new(),
            pos: Vec::new(),
            neg: Vec::new(),
        };
        let mut member = vec![0usize; sl.len()];
        for i in order {
            let s = sl.scores[i];
            if groups.thresholds.last() != Some(&s) {
                groups.thresholds.push(s);
                groups.pos.push(0);
                groups.neg.push(0);
            }
            let g = groups.thresholds.len() - 1;
            if sl.labels[i] {
                groups.pos[g] += 1;
            } else {
                groups.neg[g] += 1;
            }
            member[i] = g;
        }
        (groups, member)
    }

    pub fn new(sl: &ScoredLabels<T>) -> Self {
        Self::with_membership(sl).0
    }

    pub fn totals(&self) -> (u64, u64) {
        (self.pos.iter().sum(), self.neg.iter().sum())
    }
}

/// Ratio that may be undefined (`0/0`).
#[inline]
pub(crate) fn ratio<T: Scalar>(num: u64, den: u64) -> Option<T> {
    (den > 0).then(|| T::of(num as f64 / den as f64))
}
