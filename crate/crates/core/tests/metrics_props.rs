mod common;

use common::{pair_count_auc, scan_average_precision};
use covboost::metrics::{
    aupr, auroc, bootstrap_ci, pr_curve, roc_curve, threshold_report, threshold_table, trapezoid, Metric, ScoredLabels,
};
use covboost::rng::SeededRng;
use proptest::prelude::*;

/// Scores from a small integer grid so ties are common.
fn scored_labels() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (2usize..=200).prop_flat_map(|n| {
        (
            prop::collection::vec(0u8..12, n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(s, mut l)| {
                l[0] = true;
                l[1] = false;
                (s.into_iter().map(|v| v as f64 / 11.0).collect(), l)
            })
    })
}

proptest! {
    #[test]
    fn auroc_equals_pair_count_and_trapezoid((scores, labels) in scored_labels()) {
        let sl = ScoredLabels::new(scores.clone(), labels.clone()).unwrap();
        let a = auroc(&sl).unwrap();
        prop_assert_eq!(a, pair_count_auc(&scores, &labels));
        let t = trapezoid(&roc_curve(&sl).unwrap());
        prop_assert!((a - t).abs() <= 1e-12);
    }

    #[test]
    fn auroc_is_rank_invariant((scores, labels) in scored_labels()) {
        let sl = ScoredLabels::new(scores.clone(), labels.clone()).unwrap();
        let warped = ScoredLabels::new(scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect(), labels).unwrap();
        prop_assert_eq!(auroc(&sl).unwrap(), auroc(&warped).unwrap());
    }

    #[test]
    fn average_precision_matches_scan((scores, labels) in scored_labels()) {
        let sl = ScoredLabels::new(scores.clone(), labels.clone()).unwrap();
        prop_assert!((aupr(&sl).unwrap() - scan_average_precision(&scores, &labels)).abs() < 1e-12);
        let pr = pr_curve(&sl).unwrap();
        prop_assert!(pr.windows(2).all(|w| w[0].recall <= w[1].recall && w[0].threshold > w[1].threshold));
    }

    #[test]
    fn roc_endpoints_and_table((scores, labels) in scored_labels()) {
        let sl = ScoredLabels::new(scores, labels).unwrap();
        let roc = roc_curve(&sl).unwrap();
        prop_assert_eq!((roc[0].fpr, roc[0].tpr), (0.0, 0.0));
        let last = roc.last().unwrap();
        prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for r in threshold_table(&sl) {
            prop_assert_eq!(r.n() as usize, sl.len());
            prop_assert_eq!(r.fnr, r.sensitivity.map(|s| 1.0 - s));
            prop_assert_eq!(r.fpr, r.specificity.map(|s| 1.0 - s));
            prop_assert_eq!(r.fdr, r.ppv.map(|s| 1.0 - s));
            prop_assert_eq!(r, threshold_report(&sl, r.threshold));
        }
    }
}

#[test]
fn label_swap_complements_without_ties() {
    let mut rng = SeededRng::new(77);
    for _ in 0..50 {
        let n = 2 + rng.below(150) as usize;
        let scores: Vec<f64> = (0..n).map(|_| rng.unit()).collect();
        let mut labels: Vec<bool> = (0..n).map(|_| rng.coin(0.3)).collect();
        labels[0] = true;
        labels[1] = false;
        let a = auroc(&ScoredLabels::new(scores.clone(), labels.clone()).unwrap()).unwrap();
        let swapped = auroc(&ScoredLabels::new(scores, labels.iter().map(|l| !l).collect()).unwrap()).unwrap();
        assert!((a + swapped - 1.0).abs() < 1e-12);
    }
}

/// Scores where a positive outranks a negative about 90% of the time.
fn separable(n: usize, seed: u64) -> ScoredLabels<f64> {
    let mut rng = SeededRng::new(seed);
    let labels: Vec<bool> = (0..n).map(|_| rng.coin(0.3)).collect();
    let scores = labels
        .iter()
        .map(|&l| {
            // sum of uniforms, shifted for positives
            let noise: f64 = (0..4).map(|_| rng.unit()).sum();
            noise + if l { 1.5 } else { 0.0 }
        })
        .collect();
    ScoredLabels::new(scores, labels).unwrap()
}

#[test]
fn bootstrap_width_shrinks_with_sample_size() {
    let small = separable(500, 1);
    let large = separable(5000, 2);
    let a = bootstrap_ci(Metric::Auroc, &small, 1000, 0.05, 10).unwrap();
    let b = bootstrap_ci(Metric::Auroc, &large, 1000, 0.05, 10).unwrap();
    assert!(a.point > 0.85 && a.point < 0.97, "{}", a.point);
    assert!(a.lo <= a.point && a.point <= a.hi);
    assert!(b.lo <= b.point && b.point <= b.hi);
    let ratio = (a.hi - a.lo) / (b.hi - b.lo);
    let expected = 10f64.sqrt();
    assert!((ratio / expected - 1.0).abs() <= 0.5, "width ratio {ratio}");
}

#[test]
fn bootstrap_is_thread_count_independent() {
    let sl = separable(2000, 3);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bootstrap_ci(Metric::Aupr, &sl, 300, 0.05, 44).unwrap())
    };
    assert_eq!(run(1), run(4));
}
