//! Conformal hyperdimensional classification.
//!
//! Hypervector algebra, encoders, prototype classifiers, split-conformal
//! calibration and the evaluation harness used to measure them.

pub mod classifier;
pub mod config;
pub mod conformal;
pub mod data;
pub mod encoders;
pub mod error;
pub mod eval;
pub mod hypervector;
pub mod rng;

pub use classifier::{argmax, build_prototypes, train_prototypes, PrototypeStyle, TrainedModel};
pub use config::{DatasetKind, ExperimentConfig};
pub use conformal::{Calibrator, ConditionalCalibrator, MarginalCalibrator, PredictionSet, ScoreKind};
pub use data::DatasetBundle;
pub use encoders::{Encoder, EncoderSpec, Features};
pub use error::{Error, Result};
pub use eval::{run_experiment, ExperimentPlan, ExperimentResult};
pub use hypervector::{
    bind, bundle, permute, sign_binarize, similarity, BipolarHypervector, ComplexAccumulator,
    ComplexHypervector, Hypervector, RealAccumulator, SimilarityKind,
};
