//! Exact SHAP attributions for the boosted ensemble.
//!
//! The value function of a coalition `S` is the path-dependent conditional
//! expectation: at a split on a feature outside `S` both children are
//! visited and weighted by their share of the training cover. Attributions
//! are in raw log-odds units and are computed per tree with the polynomial
//! TreeSHAP recursion, then summed across trees.

mod treeshap;

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{Dataset, Feature, NUM_FEATURES};
use crate::gbm::{Model, Node};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum ShapError {
    #[error("degenerate tree cover: tree {tree}, node {node} has cover {cover}")]
    DegenerateCover { tree: usize, node: usize, cover: f64 },
    #[error("dataset is empty")]
    EmptyDataset,
}

/// Additive explanation of one prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapExplanation<T> {
    /// Expected raw score under the cover-weighted distribution.
    pub base_value: T,
    /// One attribution per feature, schema order.
    pub contributions: [T; NUM_FEATURES],
    pub record: [bool; NUM_FEATURES],
}

impl<T: Scalar> ShapExplanation<T> {
    /// `base_value + Σ contributions`; equals the raw prediction.
    pub fn total(&self) -> T {
        self.contributions.iter().fold(self.base_value, |acc, &c| acc + c)
    }

    pub fn contribution(&self, feature: Feature) -> T {
        self.contributions[feature.index()]
    }
}

/// Explainer bound to a model whose covers have been checked.
#[derive(Debug, Clone, Copy)]
pub struct TreeExplainer<'a, T> {
    model: &'a Model<T>,
    base_value: T,
}

impl<'a, T: Scalar> TreeExplainer<'a, T> {
    pub fn new(model: &'a Model<T>) -> Result<Self, ShapError> {
        for (ti, tree) in model.trees().iter().enumerate() {
            for (ni, node) in tree.nodes().iter().enumerate() {
                if let Node::Split { cover, .. } = *node {
                    // also rejects NaN
                    if cover.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
                        return Err(ShapError::DegenerateCover {
                            tree: ti,
                            node: ni,
                            cover: cover.as_f64(),
                        });
                    }
                }
            }
        }
        let base_value = model
            .trees()
            .iter()
            .fold(model.base_score(), |acc, t| acc + t.expected_value());
        Ok(Self { model, base_value })
    }

    pub fn base_value(&self) -> T {
        self.base_value
    }

    pub fn explain(&self, record: &[bool; NUM_FEATURES]) -> ShapExplanation<T> {
        let mut phi = [T::zero(); NUM_FEATURES];
        for tree in self.model.trees() {
            treeshap::accumulate(tree, record, &mut phi);
        }
        ShapExplanation {
            base_value: self.base_value,
            contributions: phi,
            record: *record,
        }
    }

    /// Explanations for every record, in dataset order. Each distinct
    /// feature pattern is explained once.
    pub fn explain_all(&self, ds: &Dataset) -> Vec<ShapExplanation<T>> {
        let mut present = [false; 1 << NUM_FEATURES];
        for r in ds {
            present[r.pattern() as usize] = true;
        }
        let patterns: Vec<usize> = (0..present.len()).filter(|&p| present[p]).collect();
        let explained: Vec<ShapExplanation<T>> = patterns
            .par_iter()
            .map(|&p| self.explain(&std::array::from_fn(|i| p & (1 << i) != 0)))
            .collect();
        let mut slot = [usize::MAX; 1 << NUM_FEATURES];
        for (k, &p) in patterns.iter().enumerate() {
            slot[p] = k;
        }
        ds.iter().map(|r| explained[slot[r.pattern() as usize]]).collect()
    }
}

/// Explains a single record.
pub fn explain<T: Scalar>(model: &Model<T>, record: &[bool; NUM_FEATURES]) -> Result<ShapExplanation<T>, ShapError> {
    Ok(TreeExplainer::new(model)?.explain(record))
}

/// Features ordered by mean absolute attribution, largest first; equal
/// values keep schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking<T> {
    pub entries: Vec<(Feature, T)>,
}

impl<T: Scalar> FeatureRanking<T> {
    pub fn from_means(means: [T; NUM_FEATURES]) -> Self {
        let mut entries: Vec<(Feature, T)> = Feature::ALL.iter().copied().zip(means).collect();
        entries.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });
        Self { entries }
    }

    pub fn features(&self) -> Vec<Feature> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn rank_of(&self, feature: Feature) -> usize {
        self.entries
            .iter()
            .position(|e| e.0 == feature)
            .expect("ranking lists every feature")
    }
}

fn mean_abs<T: Scalar>(explanations: &[ShapExplanation<T>]) -> [T; NUM_FEATURES] {
    let mut sums = [T::zero(); NUM_FEATURES];
    for e in explanations {
        for (s, c) in sums.iter_mut().zip(e.contributions) {
            *s = *s + c.abs();
        }
    }
    let n = T::from_count(explanations.len());
    sums.map(|s| s / n)
}

/// Mean `|φ_i|` over the dataset for each feature, as a ranking.
pub fn mean_abs_shap<T: Scalar>(model: &Model<T>, ds: &Dataset) -> Result<FeatureRanking<T>, ShapError> {
    if ds.is_empty() {
        return Err(ShapError::EmptyDataset);
    }
    let explanations = TreeExplainer::new(model)?.explain_all(ds);
    Ok(FeatureRanking::from_means(mean_abs(&explanations)))
}

/// One dot of a beeswarm plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeeswarmPoint<T> {
    pub feature: Feature,
    pub record_index: usize,
    pub shap_value: T,
    pub feature_value: bool,
}

/// One point per (record, feature): features in ranking order, records in
/// dataset order within each feature.
pub fn beeswarm_points<T: Scalar>(model: &Model<T>, ds: &Dataset) -> Result<Vec<BeeswarmPoint<T>>, ShapError> {
    if ds.is_empty() {
        return Err(ShapError::EmptyDataset);
    }
    let explanations = TreeExplainer::new(model)?.explain_all(ds);
    let ranking = FeatureRanking::from_means(mean_abs(&explanations));
    let mut points = Vec::with_capacity(ds.len() * NUM_FEATURES);
    for feature in ranking.features() {
        for (record_index, e) in explanations.iter().enumerate() {
            points.push(BeeswarmPoint {
                feature,
                record_index,
                shap_value: e.contribution(feature),
                feature_value: e.record[feature.index()],
            });
        }
    }
    Ok(points)
}
