//! Concentric-rings dataset: a small, seeded classification problem that a
//! line cannot solve in the raw plane but can after appending `x² + y²`.
//!
//! The inner ring is labeled Good and the outer ring Bad. Points are drawn
//! at uniform angles on their ring and perturbed by isotropic Gaussian
//! noise. Sample ids are `train-0000`, `test-0000`, ... with Good and Bad
//! alternating so the first `2k` rows are balanced.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSource, LabeledFeatureSet, QualityLabel, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingsConfig {
    pub seed: u64,
    /// Total training samples, split evenly between the classes.
    pub n_train: usize,
    pub n_test: usize,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Standard deviation of the per-coordinate noise.
    pub noise: f64,
}

impl Default for RingsConfig {
    fn default() -> Self {
        RingsConfig {
            seed: 7,
            n_train: 300,
            n_test: 120,
            inner_radius: 1.0,
            outer_radius: 2.0,
            noise: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingsSplit {
    pub train: LabeledFeatureSet,
    pub test: LabeledFeatureSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingsData {
    /// 2-D points.
    pub raw: RingsSplit,
    /// The same points with `x² + y²` appended.
    pub lifted: RingsSplit,
}

impl RingsConfig {
    pub fn validate(&self) -> Result<()> {
        let radius_ok = |r: f64| r.is_finite() && r > 0.0;
        if !radius_ok(self.inner_radius) || !radius_ok(self.outer_radius) {
            return Err(Error::Value(format!(
                "radii must be positive, got {} and {}",
                self.inner_radius, self.outer_radius
            )));
        }
        if self.inner_radius >= self.outer_radius {
            return Err(Error::Value(format!(
                "inner radius {} must be smaller than outer radius {}",
                self.inner_radius, self.outer_radius
            )));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::Value(format!("noise must be non-negative, got {}", self.noise)));
        }
        for (name, n) in [("n-train", self.n_train), ("n-test", self.n_test)] {
            if n % 2 != 0 || n < 8 {
                return Err(Error::Value(format!(
                    "{name} must be even and at least 8 (4 per class), got {n}"
                )));
            }
        }
        Ok(())
    }
}

fn lift(p: &[f64]) -> Vec<f64> {
    vec![p[0], p[1], p[0] * p[0] + p[1] * p[1]]
}

fn draw(
    rng: &mut ChaCha8Rng,
    noise: &Normal<f64>,
    config: &RingsConfig,
    prefix: &str,
    n: usize,
) -> Vec<Sample> {
    (0..n)
        .map(|i| {
            let (label, radius) = if i % 2 == 0 {
                (QualityLabel::Good, config.inner_radius)
            } else {
                (QualityLabel::Bad, config.outer_radius)
            };
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let x = radius * theta.cos() + noise.sample(rng);
            let y = radius * theta.sin() + noise.sample(rng);
            Sample::new(format!("{prefix}-{i:04}"), vec![x, y], label)
        })
        .collect()
}

pub fn rings_oracle(config: &RingsConfig) -> Result<RingsData> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = Normal::new(0.0, config.noise)
        .map_err(|e| Error::Value(format!("noise: {e}")))?;
    let raw_source = FeatureSource::Other("rings-raw".into());
    let lifted_source = FeatureSource::Other("rings-lifted".into());
    let train = LabeledFeatureSet::new(
        raw_source.clone(),
        2,
        draw(&mut rng, &noise, config, "train", config.n_train),
    )?;
    let test = LabeledFeatureSet::new(
        raw_source,
        2,
        draw(&mut rng, &noise, config, "test", config.n_test),
    )?;
    let lifted = RingsSplit {
        train: train.map_features(lifted_source.clone(), |p| Ok(lift(p)))?,
        test: test.map_features(lifted_source, |p| Ok(lift(p)))?,
    };
    Ok(RingsData {
        raw: RingsSplit { train, test },
        lifted,
    })
}
