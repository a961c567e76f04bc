//! Second-order gradient boosting on the logistic loss with leaf-wise grown
//! decision trees over the eight binary features.

mod grow;
mod io;
mod loss;
mod model;
mod tree;

use thiserror::Error;

pub use grow::{fit, fit_traced};
pub use io::{load_model, save_model, FORMAT_VERSION};
pub use loss::{log_loss, logistic_grad_hess};
pub use model::Model;
pub use tree::{Node, Tree};

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum GbmError {
    #[error("training data is empty")]
    EmptyDataset,
    #[error("training data holds a single class")]
    SingleClass,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("malformed model document: {0}")]
    Malformed(String),
    #[error("unsupported model format_version {found} (expected {expected})")]
    VersionMismatch { found: i64, expected: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Boosting hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig<T> {
    pub num_rounds: usize,
    pub learning_rate: T,
    pub max_leaves: usize,
    pub min_samples_leaf: usize,
    pub l2_lambda: T,
    pub min_split_gain: T,
    /// Echoed into the model; training itself draws no random numbers.
    pub seed: u64,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            num_rounds: 100,
            learning_rate: T::of(0.1),
            max_leaves: 16,
            min_samples_leaf: 20,
            l2_lambda: T::one(),
            min_split_gain: T::zero(),
            seed: 0,
        }
    }
}

impl<T: Scalar> TrainConfig<T> {
    pub fn validate(&self) -> Result<(), GbmError> {
        let bad = |m: &str| Err(GbmError::InvalidConfig(m.to_string()));
        if !(self.learning_rate > T::zero() && self.learning_rate <= T::one()) {
            return bad("learning_rate must be in (0, 1]");
        }
        if self.max_leaves < 2 {
            return bad("max_leaves must be at least 2");
        }
        if self.min_samples_leaf < 1 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(self.l2_lambda >= T::zero() && self.l2_lambda.is_finite()) {
            return bad("l2_lambda must be a nonnegative real");
        }
        if !(self.min_split_gain >= T::zero() && self.min_split_gain.is_finite()) {
            return bad("min_split_gain must be a nonnegative real");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = TrainConfig::<f64>::default();
        cfg.validate().unwrap();
        assert_eq!((cfg.num_rounds, cfg.max_leaves, cfg.min_samples_leaf), (100, 16, 20));
        assert_eq!(cfg.learning_rate, 0.1);
        TrainConfig::<f32>::default().validate().unwrap();
    }

    #[test]
    fn bounds_are_enforced() {
        let base = TrainConfig::<f64>::default();
        for cfg in [
            TrainConfig {
                learning_rate: 0.0,
                ..base
            },
            TrainConfig {
                learning_rate: 1.5,
                ..base
            },
            TrainConfig { max_leaves: 1, ..base },
            TrainConfig {
                min_samples_leaf: 0,
                ..base
            },
            TrainConfig {
                l2_lambda: -1.0,
                ..base
            },
            TrainConfig {
                min_split_gain: f64::NAN,
                ..base
            },
        ] {
            assert!(matches!(cfg.validate(), Err(GbmError::InvalidConfig(_))), "{cfg:?}");
        }
        TrainConfig {
            learning_rate: 1.0,
            l2_lambda: 0.0,
            ..base
        }
        .validate()
        .unwrap();
    }
}
