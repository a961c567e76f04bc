use super::{Groups, MetricsError, ScoredLabels};
use crate::scalar::Scalar;

/// ROC vertex reached when predicting positive for `score >= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint<T> {
    pub fpr: T,
    pub tpr: T,
    pub threshold: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint<T> {
    pub recall: T,
    pub precision: T,
    pub threshold: T,
}

/// Mann-Whitney statistic from grouped counts: concordant pairs count 1,
/// tied pairs ½.
pub(crate) fn auroc_groups<T: Scalar>(g: &Groups<T>) -> Result<T, MetricsError> {
    let (p, n) = g.totals();
    if p == 0 || n == 0 {
        return Err(MetricsError::SingleClass);
    }
    // twice the U statistic, kept integral
    let mut neg_above = 0u128;
    let mut twice_u = 0u128;
    for (&pos, &neg) in g.pos.iter().zip(&g.neg) {
        let neg_below = n as u128 - neg_above - neg as u128;
        twice_u += pos as u128 * (2 * neg_below + neg as u128);
        neg_above += neg as u128;
    }
    Ok(T::of(twice_u as f64 / (2 * p as u128 * n as u128) as f64))
}

pub(crate) fn aupr_groups<T: Scalar>(g: &Groups<T>) -> Result<T, MetricsError> {
    let (p, _) = g.totals();
    if p == 0 {
        return Err(MetricsError::NoPositives);
    }
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut sum = 0.0f64;
    for (&pos, &neg) in g.pos.iter().zip(&g.neg) {
        tp += pos;
        fp += neg;
        if pos > 0 {
            sum += (pos as f64 / p as f64) * (tp as f64 / (tp + fp) as f64);
        }
    }
    Ok(T::of(sum))
}

pub(crate) fn roc_groups<T: Scalar>(g: &Groups<T>) -> Result<Vec<RocPoint<T>>, MetricsError> {
    let (p, n) = g.totals();
    if p == 0 || n == 0 {
        return Err(MetricsError::SingleClass);
    }
    let mut points = Vec::with_capacity(g.thresholds.len() + 1);
    points.push(RocPoint {
        fpr: T::zero(),
        tpr: T::zero(),
        threshold: T::infinity(),
    });
    let (mut tp, mut fp) = (0u64, 0u64);
    for ((&threshold, &pos), &neg) in g.thresholds.iter().zip(&g.pos).zip(&g.neg) {
        tp += pos;
        fp += neg;
        points.push(RocPoint {
            fpr: T::of(fp as f64 / n as f64),
            tpr: T::of(tp as f64 / p as f64),
            threshold,
        });
    }
    Ok(points)
}

/// Area under the ROC curve: the probability that a random positive
/// outscores a random negative, ties counting one half.
pub fn auroc<T: Scalar>(sl: &ScoredLabels<T>) -> Result<T, MetricsError> {
    auroc_groups(&Groups::new(sl))
}

/// Average precision: `Σ (R_k − R_{k−1}) · P_k` over distinct thresholds in
/// descending order, tied scores sharing one threshold.
pub fn aupr<T: Scalar>(sl: &ScoredLabels<T>) -> Result<T, MetricsError> {
    aupr_groups(&Groups::new(sl))
}

/// `(0, 0)` at threshold `+inf`, then one vertex per distinct score in
/// descending order; the last vertex is `(1, 1)`.
pub fn roc_curve<T: Scalar>(sl: &ScoredLabels<T>) -> Result<Vec<RocPoint<T>>, MetricsError> {
    roc_groups(&Groups::new(sl))
}

/// One point per distinct score in descending order; recall is
/// nondecreasing along the list.
pub fn pr_curve<T: Scalar>(sl: &ScoredLabels<T>) -> Result<Vec<PrPoint<T>>, MetricsError> {
    let g = Groups::new(sl);
    let (p, _) = g.totals();
    if p == 0 {
        return Err(MetricsError::NoPositives);
    }
    let (mut tp, mut fp) = (0u64, 0u64);
    Ok(g.thresholds
        .iter()
        .zip(&g.pos)
        .zip(&g.neg)
        .map(|((&threshold, &pos), &neg)| {
            tp += pos;
            fp += neg;
            PrPoint {
                recall: T::of(tp as f64 / p as f64),
                precision: T::of(tp as f64 / (tp + fp) as f64),
                threshold,
            }
        })
        .collect())
}

/// Trapezoidal area under a ROC polyline.
pub fn trapezoid<T: Scalar>(points: &[RocPoint<T>]) -> T {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) * T::half())
        .fold(T::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl(scores: &[f64], labels: &[u8]) -> ScoredLabels<f64> {
        ScoredLabels::new(scores.to_vec(), labels.iter().map(|&l| l == 1).collect()).unwrap()
    }

    #[test]
    fn auroc_examples() {
        assert_eq!(auroc(&sl(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0])).unwrap(), 1.0);
        assert_eq!(auroc(&sl(&[0.5; 6], &[1, 0, 1, 0, 0, 1])).unwrap(), 0.5);
        assert_eq!(auroc(&sl(&[0.9, 0.8, 0.7, 0.6], &[1, 0, 1, 0])).unwrap(), 0.75);
        assert_eq!(auroc(&sl(&[0.9, 0.8], &[1, 1])), Err(MetricsError::SingleClass));
    }

    #[test]
    fn aupr_examples() {
        assert_eq!(aupr(&sl(&[0.3, 0.2, 0.1], &[1, 1, 1])).unwrap(), 1.0);
        assert_eq!(aupr(&sl(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0])).unwrap(), 1.0);
        assert!((aupr(&sl(&[0.9, 0.8, 0.7], &[1, 0, 1])).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(aupr(&sl(&[0.9, 0.8], &[0, 0])), Err(MetricsError::NoPositives));
    }

    #[test]
    fn roc_two_points() {
        let c = roc_curve(&sl(&[1.0, 0.0], &[1, 0])).unwrap();
        let xy: Vec<(f64, f64)> = c.iter().map(|p| (p.fpr, p.tpr)).collect();
        assert_eq!(xy, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(c[0].threshold, f64::INFINITY);
    }

    #[test]
    fn ties_collapse_to_one_threshold() {
        let c = roc_curve(&sl(&[0.4, 0.4, 0.4, 0.1], &[1, 0, 1, 0])).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!((c[1].fpr, c[1].tpr, c[1].threshold), (0.5, 1.0, 0.4));
        let pr = pr_curve(&sl(&[0.4, 0.4, 0.4, 0.1], &[1, 0, 1, 0])).unwrap();
        assert_eq!(pr.len(), 2);
        assert_eq!((pr[0].recall, pr[0].precision), (1.0, 2.0 / 3.0));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            ScoredLabels::new(vec![0.1f64], vec![]),
            Err(MetricsError::LengthMismatch { .. })
        ));
        assert_eq!(ScoredLabels::<f64>::new(vec![], vec![]), Err(MetricsError::Empty));
        assert_eq!(
            ScoredLabels::new(vec![0.1, f64::NAN], vec![true, false]),
            Err(MetricsError::NanScore(1))
        );
    }
}
