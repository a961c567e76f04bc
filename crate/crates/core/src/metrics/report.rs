use super::{ratio, Groups, MetricsError, ScoredLabels};
use crate::scalar::Scalar;

/// Confusion matrix and derived rates at one threshold. A record is
/// predicted positive when `score >= threshold`. Ratios with a zero
/// denominator are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport<T> {
    pub threshold: T,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
    pub accuracy: T,
    pub sensitivity: Option<T>,
    pub specificity: Option<T>,
    pub ppv: Option<T>,
    pub npv: Option<T>,
    pub fnr: Option<T>,
    pub fpr: Option<T>,
    pub fdr: Option<T>,
}

impl<T: Scalar> ThresholdReport<T> {
    pub fn from_counts(threshold: T, tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        let n = tp + fp + tn + fn_;
        let sensitivity = ratio(tp, tp + fn_);
        let specificity = ratio(tn, tn + fp);
        let ppv = ratio(tp, tp + fp);
        let complement = |r: Option<T>| r.map(|v| T::one() - v);
        Self {
            threshold,
            tp,
            fp,
            tn,
            fn_,
            accuracy: ratio(tp + tn, n).unwrap_or_else(T::nan),
            sensitivity,
            specificity,
            ppv,
            npv: ratio(tn, tn + fn_),
            fnr: complement(sensitivity),
            fpr: complement(specificity),
            fdr: complement(ppv),
        }
    }

    pub fn n(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn threshold_report<T: Scalar>(sl: &ScoredLabels<T>, threshold: T) -> ThresholdReport<T> {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&s, &l) in sl.scores().iter().zip(sl.labels()) {
        match (s >= threshold, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    ThresholdReport::from_counts(threshold, tp, fp, tn, fn_)
}

/// One report per distinct score, highest threshold first.
pub fn threshold_table<T: Scalar>(sl: &ScoredLabels<T>) -> Vec<ThresholdReport<T>> {
    reports(&Groups::new(sl))
}

fn reports<T: Scalar>(g: &Groups<T>) -> Vec<ThresholdReport<T>> {
    let (p, n) = g.totals();
    let (mut tp, mut fp) = (0, 0);
    g.thresholds
        .iter()
        .zip(&g.pos)
        .zip(&g.neg)
        .map(|((&t, &pos), &neg)| {
            tp += pos;
            fp += neg;
            ThresholdReport::from_counts(t, tp, fp, n - fp, p - tp)
        })
        .collect()
}

fn check_target(target: f64) -> Result<(), MetricsError> {
    if target > 0.0 && target <= 1.0 {
        Ok(())
    } else {
        Err(MetricsError::InvalidArgument(format!(
            "target {target} is outside (0, 1]"
        )))
    }
}

/// Highest distinct-score threshold whose sensitivity is at least `target`.
pub fn threshold_for_sensitivity<T: Scalar>(
    sl: &ScoredLabels<T>,
    target: f64,
) -> Result<(T, ThresholdReport<T>), MetricsError> {
    check_target(target)?;
    if sl.n_positive() == 0 {
        return Err(MetricsError::NoPositives);
    }
    let target_t = T::of(target);
    reports(&Groups::new(sl))
        .into_iter()
        .find(|r| r.sensitivity.is_some_and(|s| s >= target_t))
        .map(|r| (r.threshold, r))
        .ok_or(MetricsError::TargetUnreachable { target })
}

/// Lowest distinct-score threshold whose specificity is at least `target`.
pub fn threshold_for_specificity<T: Scalar>(
    sl: &ScoredLabels<T>,
    target: f64,
) -> Result<(T, ThresholdReport<T>), MetricsError> {
    check_target(target)?;
    if sl.n_negative() == 0 {
        return Err(MetricsError::InvalidArgument(
            "specificity needs at least one negative".into(),
        ));
    }
    let target_t = T::of(target);
    reports(&Groups::new(sl))
        .into_iter()
        .rev()
        .find(|r| r.specificity.is_some_and(|s| s >= target_t))
        .map(|r| (r.threshold, r))
        .ok_or(MetricsError::TargetUnreachable { target })
}
