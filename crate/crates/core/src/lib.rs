//! Gradient-boosted decision trees for RT-PCR outcome prediction from eight
//! binary features, with exact tree SHAP attributions, ROC/PR evaluation
//! with bootstrap confidence intervals and a synthetic data generator
//! calibrated to published class-conditional feature counts.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, the precision of every persisted file.

pub mod dataset;
pub mod gbm;
pub mod metrics;
pub mod rng;
pub mod scalar;
pub mod shap;

pub use dataset::{Dataset, DatasetError, Feature, FeatureSchema, MarginalTable, Record, NUM_FEATURES};
pub use gbm::GbmError;
pub use metrics::{Metric, MetricsError};
pub use scalar::Scalar;
pub use shap::ShapError;

pub type Model = gbm::Model<f64>;
pub type Tree = gbm::Tree<f64>;
pub type TrainConfig = gbm::TrainConfig<f64>;
pub type ShapExplanation = shap::ShapExplanation<f64>;
pub type FeatureRanking = shap::FeatureRanking<f64>;
pub type ScoredLabels = metrics::ScoredLabels<f64>;
pub type ThresholdReport = metrics::ThresholdReport<f64>;
pub type BootstrapCI = metrics::BootstrapCI<f64>;

pub type ModelF32 = gbm::Model<f32>;
pub type TrainConfigF32 = gbm::TrainConfig<f32>;
pub type ScoredLabelsF32 = metrics::ScoredLabels<f32>;
