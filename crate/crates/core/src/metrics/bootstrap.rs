//! Percentile bootstrap over paired `(score, label)` resamples.
//!
//! Resample `r` draws from its own generator seeded with
//! `derive_seed(seed, r)`, so results do not depend on how resamples are
//! scheduled across threads. A resample lacking a class the metric needs is
//! redrawn from the same stream, at most [`MAX_REDRAWS`] times, and is then
//! counted as failed and left out.

use rayon::prelude::*;

use super::curves::{aupr_groups, auroc_groups, roc_groups};
use super::{Groups, MetricsError, ScoredLabels};
use crate::rng::{derive_seed, SeededRng};
use crate::scalar::Scalar;

pub const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Auroc,
    Aupr,
}

impl Metric {
    fn on<T: Scalar>(self, g: &Groups<T>) -> Result<T, MetricsError> {
        match self {
            Metric::Auroc => auroc_groups(g),
            Metric::Aupr => aupr_groups(g),
        }
    }

    fn admissible(self, pos: u64, neg: u64) -> bool {
        match self {
            Metric::Auroc => pos > 0 && neg > 0,
            Metric::Aupr => pos > 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCI<T> {
    pub point: T,
    pub lo: T,
    pub hi: T,
    pub n_resamples: usize,
    /// Resamples dropped after exhausting their redraws.
    pub n_failed: usize,
    pub alpha: f64,
    pub seed: u64,
}

/// Lower/upper edge of a pointwise bootstrap band for the ROC curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint<T> {
    pub fpr: T,
    pub tpr_lo: T,
    pub tpr_hi: T,
}

fn check(n_resamples: usize, alpha: f64) -> Result<(), MetricsError> {
    if n_resamples < 100 {
        return Err(MetricsError::InvalidArgument(format!(
            "n_resamples {n_resamples} < 100"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(MetricsError::InvalidArgument(format!(
            "alpha {alpha} is outside (0, 1)"
        )));
    }
    Ok(())
}

/// Draws one admissible resample as per-group counts, or `None` when every
/// redraw was inadmissible.
fn resample<T: Scalar>(
    template: &Groups<T>,
    member: &[usize],
    labels: &[bool],
    seed: u64,
    metric: Metric,
) -> Option<Groups<T>> {
    let n = member.len() as u64;
    let mut rng = SeededRng::new(seed);
    for _ in 0..=MAX_REDRAWS {
        let mut g = Groups {
            thresholds: template.thresholds.clone(),
            pos: vec![0; template.thresholds.len()],
            neg: vec![0; template.thresholds.len()],
        };
        for _ in 0..n {
            let i = rng.below(n) as usize;
            if labels[i] {
                g.pos[member[i]] += 1;
            } else {
                g.neg[member[i]] += 1;
            }
        }
        let (p, q) = g.totals();
        if metric.admissible(p, q) {
            return Some(g);
        }
    }
    None
}

/// Empirical quantile taking the `ceil(q·m)`-th smallest value, so the
/// result is always one of the resampled values.
fn quantile<T: Copy>(sorted: &[T], q: f64) -> T {
    let m = sorted.len();
    let rank = (q * m as f64 - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(m) - 1]
}

fn resamples<T: Scalar, R: Send>(
    sl: &ScoredLabels<T>,
    n_resamples: usize,
    seed: u64,
    metric: Metric,
    f: impl Fn(&Groups<T>) -> R + Sync,
) -> Vec<Option<R>> {
    let (template, member) = Groups::with_membership(sl);
    (0..n_resamples)
        .into_par_iter()
        .map(|r| resample(&template, &member, sl.labels(), derive_seed(seed, r as u64), metric).map(|g| f(&g)))
        .collect()
}

/// Percentile confidence interval for `metric`.
pub fn bootstrap_ci<T: Scalar>(
    metric: Metric,
    sl: &ScoredLabels<T>,
    n_resamples: usize,
    alpha: f64,
    seed: u64,
) -> Result<BootstrapCI<T>, MetricsError> {
    check(n_resamples, alpha)?;
    let point = metric.on(&Groups::new(sl))?;
    let draws = resamples(sl, n_resamples, seed, metric, |g| {
        metric.on(g).expect("admissible resample")
    });
    let mut values: Vec<T> = draws.iter().flatten().copied().collect();
    if values.is_empty() {
        return Err(MetricsError::AllResamplesFailed);
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    Ok(BootstrapCI {
        point,
        lo: quantile(&values, alpha / 2.0),
        hi: quantile(&values, 1.0 - alpha / 2.0),
        n_resamples,
        n_failed: n_resamples - values.len(),
        alpha,
        seed,
    })
}

/// TPR of a ROC polyline at `fpr`, interpolating linearly from the last
/// vertex with `fpr_k <= fpr`.
fn tpr_at<T: Scalar>(curve: &[(T, T)], fpr: T) -> T {
    let j = curve.partition_point(|p| p.0 <= fpr).saturating_sub(1);
    match curve.get(j + 1) {
        Some(&(f1, t1)) => {
            let (f0, t0) = curve[j];
            t0 + (fpr - f0) / (f1 - f0) * (t1 - t0)
        }
        None => curve[j].1,
    }
}

/// Pointwise percentile band of the bootstrapped ROC curve, evaluated on
/// `grid_points` evenly spaced FPR values from 0 to 1.
pub fn roc_band<T: Scalar>(
    sl: &ScoredLabels<T>,
    grid_points: usize,
    n_resamples: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<BandPoint<T>>, MetricsError> {
    check(n_resamples, alpha)?;
    if grid_points < 2 {
        return Err(MetricsError::InvalidArgument("grid needs at least 2 points".into()));
    }
    roc_groups(&Groups::new(sl))?;
    let grid: Vec<T> = (0..grid_points)
        .map(|k| T::of(k as f64 / (grid_points - 1) as f64))
        .collect();
    let draws = resamples(sl, n_resamples, seed, Metric::Auroc, |g| {
        let curve: Vec<(T, T)> = roc_groups(g)
            .expect("admissible resample")
            .iter()
            .map(|p| (p.fpr, p.tpr))
            .collect();
        grid.iter().map(|&f| tpr_at(&curve, f)).collect::<Vec<T>>()
    });
    let kept: Vec<Vec<T>> = draws.into_iter().flatten().collect();
    if kept.is_empty() {
        return Err(MetricsError::AllResamplesFailed);
    }
    Ok(grid
        .iter()
        .enumerate()
        .map(|(k, &fpr)| {
            let mut col: Vec<T> = kept.iter().map(|row| row[k]).collect();
            col.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            BandPoint {
                fpr,
                tpr_lo: quantile(&col, alpha / 2.0),
                tpr_hi: quantile(&col, 1.0 - alpha / 2.0),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separated(n: usize) -> ScoredLabels<f64> {
        let scores = (0..n).map(|i| i as f64).collect();
        let labels = (0..n).map(|i| i >= n / 2).collect();
        ScoredLabels::new(scores, labels).unwrap()
    }

    #[test]
    fn quantile_picks_order_statistics() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(quantile(&v, 0.025), 25.0);
        assert_eq!(quantile(&v, 0.975), 975.0);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 1000.0);
        assert_eq!(quantile(&[7.0], 0.5), 7.0);
    }

    #[test]
    fn degenerate_metric_gives_point_interval() {
        let ci = bootstrap_ci(Metric::Auroc, &separated(40), 200, 0.05, 3).unwrap();
        assert_eq!((ci.point, ci.lo, ci.hi), (1.0, 1.0, 1.0));
        assert_eq!(ci.n_failed, 0);
    }

    #[test]
    fn deterministic_per_seed() {
        let sl = ScoredLabels::new(
            (0..300).map(|i| ((i * 7919) % 301) as f64).collect(),
            (0..300).map(|i| i % 3 == 0).collect(),
        )
        .unwrap();
        let a = bootstrap_ci(Metric::Aupr, &sl, 150, 0.1, 9).unwrap();
        let b = bootstrap_ci(Metric::Aupr, &sl, 150, 0.1, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.lo <= a.hi);
    }

    #[test]
    fn argument_checks() {
        let sl = separated(10);
        assert!(bootstrap_ci(Metric::Auroc, &sl, 99, 0.05, 0).is_err());
        assert!(bootstrap_ci(Metric::Auroc, &sl, 100, 1.0, 0).is_err());
        let one_class = ScoredLabels::new(vec![0.1, 0.2], vec![false, false]).unwrap();
        assert_eq!(
            bootstrap_ci(Metric::Auroc, &one_class, 100, 0.05, 0),
            Err(MetricsError::SingleClass)
        );
    }

    #[test]
    fn rare_class_resamples_fail_and_are_counted() {
        // one positive in 200: most resamples miss it even after redraws
        let sl = ScoredLabels::new((0..200).map(f64::from).collect(), (0..200).map(|i| i == 0).collect()).unwrap();
        let ci = bootstrap_ci(Metric::Auroc, &sl, 100, 0.05, 1).unwrap();
        assert!(ci.n_failed < 100);
        assert_eq!(ci.point, 0.0);
    }

    #[test]
    fn band_interpolation() {
        let curve = [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (1.0, 1.0)];
        assert_eq!(tpr_at(&curve, 0.0), 0.5);
        assert_eq!(tpr_at(&curve, 0.25), 0.5);
        assert_eq!(tpr_at(&curve, 0.75), 0.75);
        assert_eq!(tpr_at(&curve, 1.0), 1.0);
    }

    #[test]
    fn band_brackets_and_spans_grid() {
        let sl = ScoredLabels::new(
            (0..200).map(|i| ((i * 37) % 101) as f64).collect(),
            (0..200).map(|i| ((i * 37) % 101) > 40 || i % 5 == 0).collect(),
        )
        .unwrap();
        let band = roc_band(&sl, 101, 100, 0.05, 4).unwrap();
        assert_eq!(band.len(), 101);
        assert_eq!((band[0].fpr, band[100].fpr), (0.0, 1.0));
        assert!(band.iter().all(|b| b.tpr_lo <= b.tpr_hi));
        assert_eq!((band[100].tpr_lo, band[100].tpr_hi), (1.0, 1.0));
    }
}
