use super::{GbmError, TrainConfig, Tree};
use crate::dataset::{FeatureSchema, NUM_FEATURES};
use crate::scalar::{sigmoid, Scalar};

/// Trained ensemble: a log-odds base score plus an ordered list of trees.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    base_score: T,
    trees: Vec<Tree<T>>,
    config: TrainConfig<T>,
}

impl<T: Scalar> Model<T> {
    /// Assembles a model, checking that every tree has at most
    /// `config.max_leaves` leaves.
    pub fn from_parts(base_score: T, trees: Vec<Tree<T>>, config: TrainConfig<T>) -> Result<Self, GbmError> {
        if !base_score.is_finite() {
            return Err(GbmError::InvalidTree(format!("base_score {base_score} is not finite")));
        }
        if let Some((i, t)) = trees
            .iter()
            .enumerate()
            .find(|(_, t)| t.num_leaves() > config.max_leaves)
        {
            return Err(GbmError::InvalidTree(format!(
                "tree {i} has {} leaves, max_leaves is {}",
                t.num_leaves(),
                config.max_leaves
            )));
        }
        Ok(Self {
            base_score,
            trees,
            config,
        })
    }

    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema
    }

    pub fn base_score(&self) -> T {
        self.base_score
    }

    pub fn trees(&self) -> &[Tree<T>] {
        &self.trees
    }

    pub fn config(&self) -> &TrainConfig<T> {
        &self.config
    }

    /// Base score plus the leaf reached in every tree, summed in tree order.
    #[inline]
    pub fn predict_raw(&self, features: &[bool; NUM_FEATURES]) -> T {
        self.trees
            .iter()
            .fold(self.base_score, |acc, t| acc + t.predict(features))
    }

    #[inline]
    pub fn predict_proba(&self, features: &[bool; NUM_FEATURES]) -> T {
        sigmoid(self.predict_raw(features))
    }

    /// `predict_raw` for an unchecked feature slice.
    pub fn try_predict_raw(&self, features: &[bool]) -> Result<T, GbmError> {
        let fixed: &[bool; NUM_FEATURES] = features.try_into().map_err(|_| {
            GbmError::SchemaMismatch(format!("expected {NUM_FEATURES} features, got {}", features.len()))
        })?;
        Ok(self.predict_raw(fixed))
    }

    /// Converts every real to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Model<U> {
        let conv = |x: T| U::of(x.as_f64());
        Model {
            base_score: conv(self.base_score),
            trees: self.trees.iter().map(|t| t.map(conv)).collect(),
            config: TrainConfig {
                num_rounds: self.config.num_rounds,
                learning_rate: conv(self.config.learning_rate),
                max_leaves: self.config.max_leaves,
                min_samples_leaf: self.config.min_samples_leaf,
                l2_lambda: conv(self.config.l2_lambda),
                min_split_gain: conv(self.config.min_split_gain),
                seed: self.config.seed,
            },
        }
    }
}
