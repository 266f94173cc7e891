//! Interpolation plans over the latent and linguistic inputs of a
//! conditional text-to-image generator, and an SVM gate that separates Good
//! from Bad samples using their feature vectors.
//!
//! The generator itself and any feature extractor live outside this crate;
//! they exchange data with it through plan JSON documents and FVEC files
//! (see [`io`]).

pub mod error;
pub mod features;
pub mod io;
pub mod latent;
pub mod pca;
pub mod rings;
pub mod svm;
pub mod toy;

pub use error::{Error, Result};
pub use features::{FeatureSource, FeatureTable, LabelMap, LabeledFeatureSet, QualityLabel, Sample};
pub use latent::{
    lerp_latent, lerp_linguistic, tri_grid, tri_latent, tri_linguistic, ConditioningPair,
    InterpolationPlan, LatentCode, MixParams, PlanKind, PlanPoint,
};
pub use pca::{fit_pca, PcaModel};
pub use rings::{rings_oracle, RingsConfig, RingsData};
pub use svm::{
    evaluate, predict, rank_by_margin, train_svm, EvalReport, KernelConfig, Prediction, Ranking,
    SvmConfig, SvmModel,
};
pub use toy::{toy_generate, ToyGenParams, ToyGenerator};
