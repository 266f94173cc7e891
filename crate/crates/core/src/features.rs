//! Feature vectors, Good/Bad labels and the sets the classifier consumes.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a feature vector came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FeatureSource {
    Pixels,
    Pca,
    Latent,
    /// Activations of a named network layer, e.g. `conv5_1`.
    Deep(String),
    /// Anything else, such as synthetic test data.
    Other(String),
}

impl fmt::Display for FeatureSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSource::Pixels => f.write_str("pixels"),
            FeatureSource::Pca => f.write_str("pca"),
            FeatureSource::Latent => f.write_str("latent"),
            FeatureSource::Deep(layer) => write!(f, "deep:{layer}"),
            FeatureSource::Other(tag) => f.write_str(tag),
        }
    }
}

impl FromStr for FeatureSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pixels" => FeatureSource::Pixels,
            "pca" => FeatureSource::Pca,
            "latent" => FeatureSource::Latent,
            "" => return Err(Error::Parse("empty feature source tag".into())),
            _ => match s.strip_prefix("deep:") {
                Some(layer) if !layer.is_empty() => FeatureSource::Deep(layer.to_string()),
                Some(_) => return Err(Error::Parse("deep feature source needs a layer name".into())),
                None => FeatureSource::Other(s.to_string()),
            },
        })
    }
}

impl TryFrom<String> for FeatureSource {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FeatureSource> for String {
    fn from(source: FeatureSource) -> Self {
        source.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QualityLabel {
    Good,
    Bad,
}

impl QualityLabel {
    /// `+1` for Good, `-1` for Bad.
    pub fn sign(self) -> f64 {
        match self {
            QualityLabel::Good => 1.0,
            QualityLabel::Bad => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QualityLabel::Good => "good",
            QualityLabel::Bad => "bad",
        }
    }
}

impl fmt::Display for QualityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub features: Vec<f64>,
    pub label: QualityLabel,
}

impl Sample {
    pub fn new(id: impl Into<String>, features: Vec<f64>, label: QualityLabel) -> Self {
        Sample {
            id: id.into(),
            features,
            label,
        }
    }
}

fn validate_rows<'a>(
    dim: usize,
    rows: impl Iterator<Item = (&'a str, &'a [f64])>,
) -> Result<()> {
    let mut seen = HashSet::new();
    for (id, values) in rows {
        if !seen.insert(id) {
            return Err(Error::Parse(format!("duplicate sample id {id:?}")));
        }
        if values.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Value(format!("sample {id:?} feature {i} is not finite")));
        }
    }
    Ok(())
}

/// Labeled samples sharing one feature length and source.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatureSet {
    source: FeatureSource,
    dim: usize,
    samples: Vec<Sample>,
}

impl LabeledFeatureSet {
    /// Checks unique ids, a common length of `dim` and finite entries.
    pub fn new(source: FeatureSource, dim: usize, samples: Vec<Sample>) -> Result<Self> {
        validate_rows(
            dim,
            samples.iter().map(|s| (s.id.as_str(), s.features.as_slice())),
        )?;
        Ok(LabeledFeatureSet {
            source,
            dim,
            samples,
        })
    }

    /// Like [`LabeledFeatureSet::new`] but takes the length from the first
    /// sample.
    pub fn from_samples(source: FeatureSource, samples: Vec<Sample>) -> Result<Self> {
        let dim = samples.first().map_or(0, |s| s.features.len());
        LabeledFeatureSet::new(source, dim, samples)
    }

    pub fn source(&self) -> &FeatureSource {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(good, bad)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let good = self
            .samples
            .iter()
            .filter(|s| s.label == QualityLabel::Good)
            .count();
        (good, self.samples.len() - good)
    }

    pub fn to_table(&self) -> FeatureTable {
        FeatureTable {
            source: self.source.clone(),
            dim: self.dim,
            ids: self.samples.iter().map(|s| s.id.clone()).collect(),
            rows: self.samples.iter().map(|s| s.features.clone()).collect(),
        }
    }

    pub fn labels(&self) -> LabelMap {
        LabelMap(
            self.samples
                .iter()
                .map(|s| (s.id.clone(), s.label))
                .collect(),
        )
    }

    /// Applies `f` to every feature vector, producing a set of a new source.
    pub fn map_features(
        &self,
        source: FeatureSource,
        mut f: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    ) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|s| Ok(Sample::new(s.id.clone(), f(&s.features)?, s.label)))
            .collect::<Result<Vec<_>>>()?;
        LabeledFeatureSet::from_samples(source, samples)
    }
}

/// Unlabeled feature rows with ids, the in-memory form of an FVEC file.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub(crate) source: FeatureSource,
    pub(crate) dim: usize,
    pub(crate) ids: Vec<String>,
    pub(crate) rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn new(
        source: FeatureSource,
        dim: usize,
        ids: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::Value(format!(
                "{} ids for {} rows",
                ids.len(),
                rows.len()
            )));
        }
        validate_rows(
            dim,
            ids.iter().map(String::as_str).zip(rows.iter().map(Vec::as_slice)),
        )?;
        Ok(FeatureTable {
            source,
            dim,
            ids,
            rows,
        })
    }

    pub fn source(&self) -> &FeatureSource {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Attaches labels by id; every row must have a label.
    pub fn with_labels(&self, labels: &LabelMap) -> Result<LabeledFeatureSet> {
        let samples = self
            .ids
            .iter()
            .zip(&self.rows)
            .map(|(id, row)| {
                let label = labels
                    .get(id)
                    .ok_or_else(|| Error::Parse(format!("no label for sample {id:?}")))?;
                Ok(Sample::new(id.clone(), row.clone(), label))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LabeledFeatureSet {
            source: self.source.clone(),
            dim: self.dim,
            samples,
        })
    }
}

/// Good/Bad labels keyed by sample id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabelMap(pub HashMap<String, QualityLabel>);

#[derive(Serialize, Deserialize)]
struct LabelEntry {
    id: String,
    label: QualityLabel,
}

impl LabelMap {
    pub fn get(&self, id: &str) -> Option<QualityLabel> {
        self.0.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses `[{"id": ..., "label": "good" | "bad"}, ...]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let entries: Vec<LabelEntry> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("labels: {e}")))?;
        let mut map = HashMap::with_capacity(entries.len());
        for e in entries {
            if map.insert(e.id.clone(), e.label).is_some() {
                return Err(Error::Parse(format!("labels: duplicate id {:?}", e.id)));
            }
        }
        Ok(LabelMap(map))
    }

    /// Serializes in the order of `ids`; ids without a label are skipped.
    pub fn to_json(&self, ids: &[String]) -> String {
        let entries: Vec<LabelEntry> = ids
            .iter()
            .filter_map(|id| {
                self.get(id).map(|label| LabelEntry {
                    id: id.clone(),
                    label,
                })
            })
            .collect();
        serde_json::to_string_pretty(&entries).expect("labels serialize")
    }
}
