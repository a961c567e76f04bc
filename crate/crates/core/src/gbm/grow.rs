//! Tree growth.
//!
//! Records sharing a feature vector always share a prediction, so gradients
//! are aggregated over the (at most 256) distinct feature patterns. Per
//! pattern `G = n0 * g(raw, 0) + n1 * g(raw, 1)` and `H = (n0 + n1) * h(raw)`;
//! node statistics are sums over patterns in ascending pattern order. This
//! makes training independent of record order, bit for bit.

use super::{log_loss, logistic_grad_hess, GbmError, Model, Node, TrainConfig, Tree};
use crate::dataset::{Dataset, Feature, NUM_FEATURES};
use crate::scalar::Scalar;

const PATTERNS: usize = 1 << NUM_FEATURES;

#[inline]
fn features_of(pattern: u8) -> [bool; NUM_FEATURES] {
    std::array::from_fn(|i| pattern & (1 << i) != 0)
}

/// Label counts per feature pattern.
struct PatternCounts {
    active: Vec<u8>,
    neg: [usize; PATTERNS],
    pos: [usize; PATTERNS],
}

impl PatternCounts {
    fn new(ds: &Dataset) -> Self {
        let mut neg = [0; PATTERNS];
        let mut pos = [0; PATTERNS];
        for r in ds {
            let p = r.pattern() as usize;
            if r.label {
                pos[p] += 1;
            } else {
                neg[p] += 1;
            }
        }
        let active = (0..PATTERNS)
            .filter(|&p| neg[p] + pos[p] > 0)
            .map(|p| p as u8)
            .collect();
        Self { active, neg, pos }
    }

    fn total(&self, p: u8) -> usize {
        self.neg[p as usize] + self.pos[p as usize]
    }

    fn mean_loss<T: Scalar>(&self, raw: &[T; PATTERNS]) -> T {
        let (mut sum, mut n) = (T::zero(), 0usize);
        for &p in &self.active {
            let r = raw[p as usize];
            sum = sum
                + T::from_count(self.pos[p as usize]) * log_loss(r, true)
                + T::from_count(self.neg[p as usize]) * log_loss(r, false);
            n += self.total(p);
        }
        sum / T::from_count(n)
    }
}

/// Per-pattern gradient statistics for one boosting round.
struct Stats<T> {
    grad: [T; PATTERNS],
    hess: [T; PATTERNS],
}

#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    feature: Feature,
    gain: T,
}

struct OpenLeaf<T> {
    node: usize,
    patterns: Vec<u8>,
    used: u8,
    grad: T,
    hess: T,
    best: Option<Candidate<T>>,
}

struct Grower<'a, T> {
    counts: &'a PatternCounts,
    stats: &'a Stats<T>,
    cfg: &'a TrainConfig<T>,
}

impl<'a, T: Scalar> Grower<'a, T> {
    fn sums(&self, patterns: &[u8]) -> (T, T, usize) {
        patterns.iter().fold((T::zero(), T::zero(), 0), |(g, h, n), &p| {
            (
                g + self.stats.grad[p as usize],
                h + self.stats.hess[p as usize],
                n + self.counts.total(p),
            )
        })
    }

    fn score(&self, g: T, h: T) -> T {
        g * g / (h + self.cfg.l2_lambda)
    }

    fn open(&self, node: usize, patterns: Vec<u8>, used: u8) -> OpenLeaf<T> {
        let (grad, hess, _) = self.sums(&patterns);
        let mut leaf = OpenLeaf {
            node,
            patterns,
            used,
            grad,
            hess,
            best: None,
        };
        leaf.best = self.best_split(&leaf);
        leaf
    }

    /// Highest positive-gain split; the lower feature index wins ties.
    fn best_split(&self, leaf: &OpenLeaf<T>) -> Option<Candidate<T>> {
        let parent = self.score(leaf.grad, leaf.hess);
        let mut best: Option<Candidate<T>> = None;
        for feature in Feature::ALL {
            let bit = 1u8 << feature.index();
            if leaf.used & bit != 0 {
                continue;
            }
            let (mut gl, mut hl, mut nl) = (T::zero(), T::zero(), 0usize);
            let (mut gr, mut hr, mut nr) = (T::zero(), T::zero(), 0usize);
            for &p in &leaf.patterns {
                let (g, h, n) = (
                    self.stats.grad[p as usize],
                    self.stats.hess[p as usize],
                    self.counts.total(p),
                );
                if p & bit == 0 {
                    (gl, hl, nl) = (gl + g, hl + h, nl + n);
                } else {
                    (gr, hr, nr) = (gr + g, hr + h, nr + n);
                }
            }
            if nl < self.cfg.min_samples_leaf || nr < self.cfg.min_samples_leaf {
                continue;
            }
            let gain = T::half() * (self.score(gl, hl) + self.score(gr, hr) - parent) - self.cfg.min_split_gain;
            if gain > T::zero() && best.map_or(true, |b| gain > b.gain) {
                best = Some(Candidate { feature, gain });
            }
        }
        best
    }

    fn grow(&self) -> Tree<T> {
        let mut nodes = vec![Node::Leaf {
            value: T::zero(),
            cover: T::zero(),
        }];
        let mut open = vec![self.open(0, self.counts.active.clone(), 0)];

        while open.len() < self.cfg.max_leaves {
            // highest gain; ties go to the earlier-created (lower index) node
            let pick = open
                .iter()
                .enumerate()
                .filter_map(|(i, l)| l.best.map(|b| (i, l.node, b.gain)))
                .fold(None, |acc: Option<(usize, usize, T)>, cur| match acc {
                    Some(a) if a.2 > cur.2 || (a.2 == cur.2 && a.1 < cur.1) => Some(a),
                    _ => Some(cur),
                });
            let Some((slot, _, _)) = pick else { break };
            let leaf = open.swap_remove(slot);
            let feature = leaf.best.expect("picked leaf has a candidate").feature;
            let bit = 1u8 << feature.index();
            let (right, left): (Vec<u8>, Vec<u8>) = leaf.patterns.iter().partition(|&&p| p & bit != 0);

            let (li, ri) = (nodes.len(), nodes.len() + 1);
            nodes[leaf.node] = Node::Split {
                feature,
                left: li,
                right: ri,
                cover: leaf.hess,
            };
            nodes.push(Node::Leaf {
                value: T::zero(),
                cover: T::zero(),
            });
            nodes.push(Node::Leaf {
                value: T::zero(),
                cover: T::zero(),
            });
            open.push(self.open(li, left, leaf.used | bit));
            open.push(self.open(ri, right, leaf.used | bit));
        }

        for leaf in &open {
            nodes[leaf.node] = Node::Leaf {
                value: -self.cfg.learning_rate * leaf.grad / (leaf.hess + self.cfg.l2_lambda),
                cover: leaf.hess,
            };
        }
        // children always come after their parent
        for i in (0..nodes.len()).rev() {
            if let Node::Split { left, right, .. } = nodes[i] {
                let sum = nodes[left].cover() + nodes[right].cover();
                if let Node::Split { cover, .. } = &mut nodes[i] {
                    *cover = sum;
                }
            }
        }
        Tree::from_trusted(nodes).preorder()
    }
}

/// Trains a model. See [`fit_traced`].
pub fn fit<T: Scalar>(ds: &Dataset, cfg: &TrainConfig<T>) -> Result<Model<T>, GbmError> {
    fit_traced(ds, cfg).map(|(m, _)| m)
}

/// Trains a model and returns the mean training log-loss before the first
/// round and after every round (`num_rounds + 1` values).
///
/// The base score is the log-odds of the training prevalence. Each round
/// grows one tree leaf-wise, splitting the open leaf with the highest
/// positive gain `½[G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)] − min_split_gain`
/// until `max_leaves` is reached or no split is admissible. Leaves take the
/// value `−learning_rate · G/(H+λ)`.
pub fn fit_traced<T: Scalar>(ds: &Dataset, cfg: &TrainConfig<T>) -> Result<(Model<T>, Vec<T>), GbmError> {
    cfg.validate()?;
    if ds.is_empty() {
        return Err(GbmError::EmptyDataset);
    }
    let counts = PatternCounts::new(ds);
    let n_pos: usize = counts.pos.iter().sum();
    let n_neg: usize = counts.neg.iter().sum();
    if n_pos == 0 || n_neg == 0 {
        return Err(GbmError::SingleClass);
    }

    let base_score = T::of((n_pos as f64 / n_neg as f64).ln());
    let mut raw = [base_score; PATTERNS];
    let mut history = Vec::with_capacity(cfg.num_rounds + 1);
    history.push(counts.mean_loss(&raw));
    let mut trees = Vec::with_capacity(cfg.num_rounds);
    let mut stats = Stats {
        grad: [T::zero(); PATTERNS],
        hess: [T::zero(); PATTERNS],
    };

    for _ in 0..cfg.num_rounds {
        for &p in &counts.active {
            let pi = p as usize;
            let (g0, h) = logistic_grad_hess(raw[pi], false);
            let (g1, _) = logistic_grad_hess(raw[pi], true);
            stats.grad[pi] = T::from_count(counts.neg[pi]) * g0 + T::from_count(counts.pos[pi]) * g1;
            stats.hess[pi] = T::from_count(counts.total(p)) * h;
        }
        let tree = Grower {
            counts: &counts,
            stats: &stats,
            cfg,
        }
        .grow();
        for &p in &counts.active {
            raw[p as usize] = raw[p as usize] + tree.predict(&features_of(p));
        }
        history.push(counts.mean_loss(&raw));
        trees.push(tree);
    }
    Ok((Model::from_parts(base_score, trees, *cfg)?, history))
}
