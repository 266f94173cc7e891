//! Good/Bad dataset manifest.
//!
//! ```json
//! {"dim": 100,
//!  "entries": [{"id": "...", "image": "...", "latent": [...],
//!               "label": "good" | "bad", "split": "train" | "test"}]}
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSource, LabeledFeatureSet, QualityLabel, Sample};
use crate::latent::LatentCode;

/// Per-class sample counts of the canonical dataset.
pub const GOOD_TOTAL: usize = 210;
pub const BAD_TOTAL: usize = 210;
pub const TRAIN_PER_CLASS: usize = 150;
pub const TEST_PER_CLASS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub image: String,
    pub latent: LatentCode,
    pub label: QualityLabel,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodBadManifest {
    pub dim: usize,
    pub entries: Vec<ManifestEntry>,
    /// Split-count problems found in lenient mode.
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RawManifest {
    dim: usize,
    entries: Vec<RawEntry>,
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    id: String,
    image: String,
    latent: Vec<f64>,
    label: QualityLabel,
    split: Split,
}

impl GoodBadManifest {
    pub fn count(&self, label: QualityLabel, split: Option<Split>) -> usize {
        self.entries
            .iter()
            .filter(|e| e.label == label && split.map_or(true, |s| e.split == s))
            .count()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    /// Latent codes of one split as a feature set (the latent-code baseline).
    pub fn latent_set(&self, split: Split) -> Result<LabeledFeatureSet> {
        let samples = self
            .split(split)
            .map(|e| Sample::new(e.id.clone(), e.latent.as_slice().to_vec(), e.label))
            .collect();
        LabeledFeatureSet::new(FeatureSource::Latent, self.dim, samples)
    }

    fn split_problems(&self) -> Vec<String> {
        let checks = [
            ("good total", self.count(QualityLabel::Good, None), GOOD_TOTAL),
            ("bad total", self.count(QualityLabel::Bad, None), BAD_TOTAL),
            ("good train", self.count(QualityLabel::Good, Some(Split::Train)), TRAIN_PER_CLASS),
            ("bad train", self.count(QualityLabel::Bad, Some(Split::Train)), TRAIN_PER_CLASS),
            ("good test", self.count(QualityLabel::Good, Some(Split::Test)), TEST_PER_CLASS),
            ("bad test", self.count(QualityLabel::Bad, Some(Split::Test)), TEST_PER_CLASS),
        ];
        checks
            .iter()
            .filter(|(_, got, want)| got != want)
            .map(|(what, got, want)| format!("{what}: expected {want}, found {got}"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let raw = RawManifest {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|e| RawEntry {
                    id: e.id.clone(),
                    image: e.image.clone(),
                    latent: e.latent.as_slice().to_vec(),
                    label: e.label,
                    split: e.split,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("manifest serializes")
    }
}

/// Parses and validates a manifest. In strict mode wrong split counts are
/// an error; otherwise they are recorded in `warnings`.
pub fn parse_manifest(text: &str, strict: bool) -> Result<GoodBadManifest> {
    let raw: RawManifest =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
    if raw.dim == 0 {
        return Err(Error::Parse("manifest: field `dim` must be at least 1".into()));
    }
    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(raw.entries.len());
    for (i, e) in raw.entries.into_iter().enumerate() {
        if !seen.insert(e.id.clone()) {
            return Err(Error::Parse(format!(
                "manifest: entries[{i}].id: duplicate id {:?}",
                e.id
            )));
        }
        if e.latent.len() != raw.dim {
            return Err(Error::Parse(format!(
                "manifest: entries[{i}].latent: expected dimension {}, found {}",
                raw.dim,
                e.latent.len()
            )));
        }
        let latent = LatentCode::new(e.latent)
            .map_err(|err| Error::Parse(format!("manifest: entries[{i}].latent: {err}")))?;
        entries.push(ManifestEntry {
            id: e.id,
            image: e.image,
            latent,
            label: e.label,
            split: e.split,
        });
    }
    let mut manifest = GoodBadManifest {
        dim: raw.dim,
        entries,
        warnings: Vec::new(),
    };
    let problems = manifest.split_problems();
    if !problems.is_empty() {
        if strict {
            return Err(Error::Split(problems.join("; ")));
        }
        manifest.warnings = problems;
    }
    Ok(manifest)
}

pub fn load_manifest(path: impl AsRef<Path>, strict: bool) -> Result<GoodBadManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text, strict)
}
