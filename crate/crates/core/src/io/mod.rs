//! File formats: FVEC feature matrices, plan documents, the dataset
//! manifest and model/report JSON.

pub mod fvec;
pub mod manifest;
pub mod model;
pub mod plan;

pub use fvec::{read_fvec, write_fvec};
pub use manifest::{load_manifest, GoodBadManifest, ManifestEntry, Split};
pub use model::{pca_from_json, read_json, svm_from_json, svm_to_json, write_json};
pub use plan::{read_plan, write_plan};
