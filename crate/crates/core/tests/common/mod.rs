//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use covboost::dataset::{Dataset, Feature, Record, NUM_FEATURES};
use covboost::gbm::{Model, Node, TrainConfig, Tree};
use covboost::rng::SeededRng;

pub fn features_of(bits: u8) -> [bool; NUM_FEATURES] {
    std::array::from_fn(|i| bits & (1 << i) != 0)
}

pub fn random_features(rng: &mut SeededRng) -> [bool; NUM_FEATURES] {
    features_of(rng.below(256) as u8)
}

/// Random tree with exactly `leaves` leaves, positive covers, leaf values in
/// [-2, 2], never testing a feature twice on a path.
pub fn random_tree(rng: &mut SeededRng, leaves: usize) -> Tree<f64> {
    // (parent-used mask) per node; leaves are split until the count is reached
    let mut nodes: Vec<Node<f64>> = vec![Node::Leaf { value: 0.0, cover: 0.0 }];
    let mut used = vec![0u8];
    let mut open = vec![0usize];
    while open.len() < leaves {
        let k = rng.below(open.len() as u64) as usize;
        let node = open[k];
        let free: Vec<Feature> = Feature::ALL
            .iter()
            .copied()
            .filter(|f| used[node] & (1 << f.index()) == 0)
            .collect();
        if free.is_empty() {
            continue;
        }
        let feature = free[rng.below(free.len() as u64) as usize];
        let (l, r) = (nodes.len(), nodes.len() + 1);
        nodes[node] = Node::Split {
            feature,
            left: l,
            right: r,
            cover: 0.0,
        };
        let mask = used[node] | (1 << feature.index());
        nodes.push(Node::Leaf { value: 0.0, cover: 0.0 });
        nodes.push(Node::Leaf { value: 0.0, cover: 0.0 });
        used.extend([mask, mask]);
        open.swap_remove(k);
        open.extend([l, r]);
    }
    for &leaf in &open {
        nodes[leaf] = Node::Leaf {
            value: rng.unit() * 4.0 - 2.0,
            cover: 0.1 + rng.unit() * 10.0,
        };
    }
    for i in (0..nodes.len()).rev() {
        if let Node::Split { left, right, .. } = nodes[i] {
            let sum = nodes[left].cover() + nodes[right].cover();
            if let Node::Split { cover, .. } = &mut nodes[i] {
                *cover = sum;
            }
        }
    }
    Tree::new(nodes).expect("generator builds valid trees")
}

/// Ensemble of `n_trees` random trees with 2..=16 leaves each.
pub fn random_model(rng: &mut SeededRng, n_trees: usize) -> Model<f64> {
    let trees = (0..n_trees)
        .map(|_| {
            let leaves = 2 + rng.below(15) as usize;
            random_tree(rng, leaves)
        })
        .collect();
    Model::from_parts(rng.unit() - 0.5, trees, TrainConfig::default()).unwrap()
}

/// Cover-weighted expectation of a tree given only the features in `mask`.
fn conditional_value(tree: &Tree<f64>, x: &[bool; NUM_FEATURES], mask: u16, node: usize) -> f64 {
    match tree.nodes()[node] {
        Node::Leaf { value, .. } => value,
        Node::Split {
            feature,
            left,
            right,
            cover,
        } => {
            if mask & (1 << feature.index()) != 0 {
                conditional_value(tree, x, mask, if x[feature.index()] { right } else { left })
            } else {
                let nodes = tree.nodes();
                (nodes[left].cover() * conditional_value(tree, x, mask, left)
                    + nodes[right].cover() * conditional_value(tree, x, mask, right))
                    / cover
            }
        }
    }
}

fn coalition_value(model: &Model<f64>, x: &[bool; NUM_FEATURES], mask: u16) -> f64 {
    model.base_score()
        + model
            .trees()
            .iter()
            .map(|t| conditional_value(t, x, mask, 0))
            .sum::<f64>()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Shapley values by enumerating all 2^8 coalitions. Returns
/// `(phi, v(empty set))`.
pub fn brute_force_shap(model: &Model<f64>, x: &[bool; NUM_FEATURES]) -> ([f64; NUM_FEATURES], f64) {
    let n = NUM_FEATURES;
    let values: Vec<f64> = (0..1u16 << n).map(|s| coalition_value(model, x, s)).collect();
    let mut phi = [0.0; NUM_FEATURES];
    for (i, slot) in phi.iter_mut().enumerate() {
        for s in 0..1u16 << n {
            if s & (1 << i) != 0 {
                continue;
            }
            let size = s.count_ones() as usize;
            let w = factorial(size) * factorial(n - size - 1) / factorial(n);
            *slot += w * (values[(s | (1 << i)) as usize] - values[s as usize]);
        }
    }
    (phi, values[0])
}

/// Mann-Whitney AUC by checking every (positive, negative) pair.
pub fn pair_count_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut sum, mut pairs) = (0.0f64, 0.0f64);
    for (i, &si) in scores.iter().enumerate() {
        if !labels[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                sum += 1.0;
            } else if si == sj {
                sum += 0.5;
            }
        }
    }
    sum / pairs
}

/// Average precision by evaluating precision at each distinct threshold
/// with a full scan.
pub fn scan_average_precision(scores: &[f64], labels: &[bool]) -> f64 {
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let p = labels.iter().filter(|&&l| l).count() as f64;
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    for t in thresholds {
        let tp = scores.iter().zip(labels).filter(|(&s, &l)| s >= t && l).count() as f64;
        let predicted = scores.iter().filter(|&&s| s >= t).count() as f64;
        let recall = tp / p;
        ap += (recall - prev_recall) * (tp / predicted);
        prev_recall = recall;
    }
    ap
}

/// Dataset with independent fair-coin features and a label that depends on
/// a few of them.
pub fn noisy_dataset(rng: &mut SeededRng, n: usize) -> Dataset {
    let records = (0..n)
        .map(|_| {
            let features = random_features(rng);
            let logit =
                -1.0 + 1.5 * features[2] as u8 as f64 + 2.0 * features[7] as u8 as f64 - 0.8 * features[0] as u8 as f64;
            let p = 1.0 / (1.0 + (-logit).exp());
            Record::new(features, rng.coin(p))
        })
        .collect();
    Dataset::new(records, "noisy")
}

/// Naive log-loss.
pub fn naive_log_loss(raw: f64, label: bool) -> f64 {
    let p = 1.0 / (1.0 + (-raw).exp());
    if label {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}
