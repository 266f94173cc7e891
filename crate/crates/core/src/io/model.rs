//! JSON files for trained models and reports.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pca::PcaModel;
use crate::svm::{DecisionFunction, KernelKind, SvmModel, TrainMeta};

#[derive(Serialize, Deserialize)]
struct SvmDoc {
    kernel: KernelKind,
    c: f64,
    bias: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support_vectors: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    feature_dim: usize,
    normalize: bool,
    #[serde(default)]
    train_meta: TrainMeta,
}

pub fn svm_to_json(model: &SvmModel) -> String {
    let mut doc = SvmDoc {
        kernel: model.kernel(),
        c: model.c(),
        bias: model.bias(),
        weights: None,
        alphas: None,
        support_vectors: None,
        gamma: None,
        feature_dim: model.feature_dim(),
        normalize: model.normalize(),
        train_meta: model.train_meta().clone(),
    };
    match model.decision() {
        DecisionFunction::Linear { weights } => doc.weights = Some(weights.clone()),
        DecisionFunction::Rbf {
            alphas,
            support_vectors,
            gamma,
        } => {
            doc.alphas = Some(alphas.clone());
            doc.support_vectors = Some(support_vectors.clone());
            doc.gamma = Some(*gamma);
        }
    }
    serde_json::to_string_pretty(&doc).expect("model serializes")
}

pub fn svm_from_json(text: &str) -> Result<SvmModel> {
    let doc: SvmDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("svm model: {e}")))?;
    let dim = doc.feature_dim;
    let decision = match doc.kernel {
        KernelKind::Linear => {
            let weights = doc
                .weights
                .ok_or_else(|| Error::Format("linear model without `weights`".into()))?;
            if weights.len() != dim {
                return Err(Error::Format(format!(
                    "{} weights for feature_dim {dim}",
                    weights.len()
                )));
            }
            DecisionFunction::Linear { weights }
        }
        KernelKind::Rbf => {
            let (Some(alphas), Some(support_vectors), Some(gamma)) =
                (doc.alphas, doc.support_vectors, doc.gamma)
            else {
                return Err(Error::Format(
                    "rbf model needs `alphas`, `support_vectors` and `gamma`".into(),
                ));
            };
            if alphas.len() != support_vectors.len()
                || support_vectors.iter().any(|s| s.len() != dim)
            {
                return Err(Error::Format("rbf support vectors do not match alphas/feature_dim".into()));
            }
            if !(gamma > 0.0) {
                return Err(Error::Format(format!("rbf gamma must be positive, got {gamma}")));
            }
            DecisionFunction::Rbf {
                alphas,
                support_vectors,
                gamma,
            }
        }
    };
    if dim == 0 {
        return Err(Error::Format("feature_dim must be at least 1".into()));
    }
    Ok(SvmModel::from_parts(
        doc.c,
        doc.bias,
        decision,
        dim,
        doc.normalize,
        doc.train_meta,
    ))
}

pub fn pca_from_json(text: &str) -> Result<PcaModel> {
    let model: PcaModel =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("pca model: {e}")))?;
    model.validate()?;
    Ok(model)
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Value(format!("{}: {e}", path.display())))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(text: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureSource, LabeledFeatureSet, QualityLabel, Sample};
    use crate::svm::{train_svm, KernelConfig, SvmConfig};

    fn data() -> LabeledFeatureSet {
        LabeledFeatureSet::from_samples(
            FeatureSource::Deep("conv5_1".into()),
            vec![
                Sample::new("a", vec![1.0, 0.2], QualityLabel::Good),
                Sample::new("b", vec![0.9, -0.3], QualityLabel::Good),
                Sample::new("c", vec![-1.0, 0.1], QualityLabel::Bad),
                Sample::new("d", vec![-0.7, -0.6], QualityLabel::Bad),
            ],
        )
        .unwrap()
    }

    #[test]
    fn models_round_trip() {
        for kernel in [KernelConfig::Linear, KernelConfig::Rbf { gamma: None }] {
            let model = train_svm(&data(), &SvmConfig { kernel, ..Default::default() }).unwrap();
            let text = svm_to_json(&model);
            assert_eq!(svm_from_json(&text).unwrap(), model);
            let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
            for key in ["kernel", "c", "bias", "feature_dim", "normalize", "train_meta"] {
                assert!(doc.get(key).is_some(), "{key}");
            }
        }
    }

    #[test]
    fn inconsistent_models_are_rejected() {
        let bad = r#"{"kernel":"linear","c":1,"bias":0,"weights":[1,2,3],"feature_dim":2,"normalize":true}"#;
        assert!(matches!(svm_from_json(bad), Err(Error::Format(_))));
        let missing = r#"{"kernel":"rbf","c":1,"bias":0,"feature_dim":2,"normalize":true}"#;
        assert!(matches!(svm_from_json(missing), Err(Error::Format(_))));
        assert!(matches!(svm_from_json("[]"), Err(Error::Parse(_))));
    }
}
