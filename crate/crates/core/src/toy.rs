//! Deterministic stand-in for the image generator.
//!
//! Each plan point is flattened to `u = [latent, sentence, mean word]` and
//! mapped to pixels by `sigmoid(scale * P u)`, where `P` is a Gaussian
//! matrix drawn from the seed and scaled by `1 / sqrt(len(u))`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latent::PlanPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyGenParams {
    pub seed: u64,
    pub height: usize,
    pub width: usize,
    pub scale: f64,
}

impl Default for ToyGenParams {
    fn default() -> Self {
        ToyGenParams {
            seed: 0,
            height: 16,
            width: 16,
            scale: 1.0,
        }
    }
}

/// An `H × W × 3` image with values in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<f64>,
}

impl Image {
    pub fn get(&self, row: usize, col: usize, channel: usize) -> f64 {
        self.pixels[(row * self.width + col) * 3 + channel]
    }

    /// Largest absolute per-pixel difference between two images.
    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        self.pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Flattened generator input of a plan point.
pub fn input_vector(point: &PlanPoint) -> Vec<f64> {
    let mut u = point.latent.as_slice().to_vec();
    if let Some(c) = &point.conditioning {
        u.extend_from_slice(c.sentence());
        u.extend(c.mean_word());
    }
    u
}

#[derive(Debug, Clone)]
pub struct ToyGenerator {
    params: ToyGenParams,
    input_dim: usize,
    // (H*W*3) x input_dim, row-major
    projection: Vec<f64>,
}

impl ToyGenerator {
    pub fn new(params: ToyGenParams, input_dim: usize) -> Result<Self> {
        if params.height == 0 || params.width == 0 {
            return Err(Error::Value(format!(
                "image size {}x{} must be at least 1x1",
                params.height, params.width
            )));
        }
        if input_dim == 0 {
            return Err(Error::DimensionRange("toy generator input must be non-empty".into()));
        }
        if !params.scale.is_finite() || params.scale < 0.0 {
            return Err(Error::Value(format!("projection scale {} is invalid", params.scale)));
        }
        let rows = params.height * params.width * 3;
        let norm = (input_dim as f64).sqrt().recip();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let projection = (0..rows * input_dim)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut rng);
                g * norm
            })
            .collect();
        Ok(ToyGenerator {
            params,
            input_dim,
            projection,
        })
    }

    /// Generator sized for the points of `plan`.
    pub fn for_point(params: ToyGenParams, point: &PlanPoint) -> Result<Self> {
        ToyGenerator::new(params, input_vector(point).len())
    }

    pub fn params(&self) -> &ToyGenParams {
        &self.params
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn projection(&self) -> &[f64] {
        &self.projection
    }

    /// Bound on the max-abs pixel change per unit Euclidean change of the
    /// input: `scale / 4 * max_r ||P_r||`, the sigmoid being 1/4-Lipschitz.
    pub fn lipschitz_bound(&self) -> f64 {
        let max_row = self
            .projection
            .chunks(self.input_dim)
            .map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        0.25 * self.params.scale * max_row
    }

    pub fn render_input(&self, u: &[f64]) -> Result<Image> {
        if u.len() != self.input_dim {
            return Err(Error::Dimension {
                expected: self.input_dim,
                actual: u.len(),
            });
        }
        let pixels = self
            .projection
            .chunks(self.input_dim)
            .map(|row| {
                let dot: f64 = row.iter().zip(u).map(|(p, x)| p * x).sum();
                sigmoid(self.params.scale * dot)
            })
            .collect();
        Ok(Image {
            height: self.params.height,
            width: self.params.width,
            pixels,
        })
    }

    pub fn render(&self, point: &PlanPoint) -> Result<Image> {
        self.render_input(&input_vector(point))
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Renders a single point with a freshly built generator.
pub fn toy_generate(point: &PlanPoint, params: &ToyGenParams) -> Result<Image> {
    ToyGenerator::for_point(*params, point)?.render(point)
}

/// Largest max-abs pixel delta between consecutive frames.
pub fn max_consecutive_delta(frames: &[Image]) -> f64 {
    frames
        .windows(2)
        .map(|w| w[0].max_abs_diff(&w[1]))
        .fold(0.0, f64::max)
}
