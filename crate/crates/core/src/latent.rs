//! Pairwise and triangular interpolation plans over latent codes and
//! conditioning pairs.
//!
//! A plan is the ordered list of generator inputs obtained by sweeping the
//! mixing parameters over a uniform grid. Pairwise plans use `steps` values
//! `γ = j / (steps - 1)`; triangular plans use every grid pair on the
//! 2-simplex, enumerated row-major in the `γ2` index so that the `γ2 = 0` row
//! is a contiguous prefix equal to the matching pairwise plan.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of grid steps along one edge.
pub const DEFAULT_STEPS: usize = 10;

/// Default latent dimensionality.
pub const DEFAULT_LATENT_DIM: usize = 100;

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Value(format!("{what}[{i}] is not finite"))),
        None => Ok(()),
    }
}

/// A latent code `z` fed to the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LatentCode(Vec<f64>);

impl LatentCode {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionRange("latent code must have at least one entry".into()));
        }
        check_finite(&values, "latent")?;
        Ok(LatentCode(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for LatentCode {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        LatentCode::new(values)
    }
}

impl From<LatentCode> for Vec<f64> {
    fn from(code: LatentCode) -> Self {
        code.0
    }
}

/// Word-embedding matrix plus sentence vector describing one text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConditioning", into = "RawConditioning")]
pub struct ConditioningPair {
    words: Vec<Vec<f64>>,
    sentence: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawConditioning {
    words: Vec<Vec<f64>>,
    sentence: Vec<f64>,
}

impl TryFrom<RawConditioning> for ConditioningPair {
    type Error = Error;

    fn try_from(raw: RawConditioning) -> Result<Self> {
        ConditioningPair::new(raw.words, raw.sentence)
    }
}

impl From<ConditioningPair> for RawConditioning {
    fn from(pair: ConditioningPair) -> Self {
        RawConditioning {
            words: pair.words,
            sentence: pair.sentence,
        }
    }
}

impl ConditioningPair {
    /// `words` is an `m × d_w` matrix given row by row (one row per word).
    pub fn new(words: Vec<Vec<f64>>, sentence: Vec<f64>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::Shape("conditioning needs at least one word".into()));
        }
        let width = words[0].len();
        if width == 0 {
            return Err(Error::Shape("word embeddings must be non-empty".into()));
        }
        if let Some(i) = words.iter().position(|w| w.len() != width) {
            return Err(Error::Shape(format!(
                "word {i} has width {}, expected {width}",
                words[i].len()
            )));
        }
        for w in &words {
            check_finite(w, "words")?;
        }
        check_finite(&sentence, "sentence")?;
        Ok(ConditioningPair { words, sentence })
    }

    pub fn words(&self) -> &[Vec<f64>] {
        &self.words
    }

    pub fn sentence(&self) -> &[f64] {
        &self.sentence
    }

    /// `(word count, word width, sentence width)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.words.len(), self.words[0].len(), self.sentence.len())
    }

    /// Column means of the word matrix.
    pub fn mean_word(&self) -> Vec<f64> {
        let m = self.words.len() as f64;
        let mut mean = vec![0.0; self.words[0].len()];
        for w in &self.words {
            for (acc, v) in mean.iter_mut().zip(w) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= m);
        mean
    }
}

/// Mixing parameters `(γ1, γ2)`; pairwise plans keep `γ2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixParams {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl MixParams {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        let ok = |g: f64| g.is_finite() && (0.0..=1.0).contains(&g);
        if !ok(gamma1) || !ok(gamma2) || gamma1 + gamma2 > 1.0 + 1e-12 {
            return Err(Error::Value(format!(
                "mix ({gamma1}, {gamma2}) is outside the 2-simplex"
            )));
        }
        Ok(MixParams { gamma1, gamma2 })
    }

    pub fn pairwise(gamma: f64) -> Result<Self> {
        MixParams::new(gamma, 0.0)
    }

    /// Barycentric weights `(1 - γ1 - γ2, γ1, γ2)` of the three corners.
    pub fn weights(&self) -> [f64; 3] {
        [
            (1.0 - self.gamma1 - self.gamma2).max(0.0),
            self.gamma1,
            self.gamma2,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanKind {
    LerpLatent,
    LerpLinguistic,
    TriLatent,
    TriLinguistic,
}

impl PlanKind {
    pub fn is_triangular(self) -> bool {
        matches!(self, PlanKind::TriLatent | PlanKind::TriLinguistic)
    }

    pub fn is_linguistic(self) -> bool {
        matches!(self, PlanKind::LerpLinguistic | PlanKind::TriLinguistic)
    }

    pub fn corner_count(self) -> usize {
        if self.is_triangular() {
            3
        } else {
            2
        }
    }

    /// Number of plan points for `steps` grid steps along an edge.
    pub fn point_count(self, steps: usize) -> usize {
        if self.is_triangular() {
            steps * (steps + 1) / 2
        } else {
            steps
        }
    }

    /// Mixing parameters of every point, in plan order.
    pub fn grid(self, steps: usize) -> Result<Vec<MixParams>> {
        if self.is_triangular() {
            tri_grid(steps)
        } else {
            lerp_grid(steps)
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PlanKind::LerpLatent => "lerp-latent",
            PlanKind::LerpLinguistic => "lerp-linguistic",
            PlanKind::TriLatent => "tri-latent",
            PlanKind::TriLinguistic => "tri-linguistic",
        }
    }
}

impl std::fmt::Display for PlanKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One corner of a plan: the latent code plus, for linguistic kinds, the
/// conditioning pair at that corner.
#[derive(Debug, Clone, PartialEq)]
pub struct Corner {
    pub latent: LatentCode,
    pub conditioning: Option<ConditioningPair>,
}

/// One generator input `G(z, (w, s))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanPoint {
    pub mix: MixParams,
    pub latent: LatentCode,
    pub conditioning: Option<ConditioningPair>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationPlan {
    kind: PlanKind,
    steps: usize,
    corners: Vec<Corner>,
    points: Vec<PlanPoint>,
}

impl InterpolationPlan {
    /// Assembles a plan from parts, checking the count law, shared
    /// dimensions and that the mixing parameters follow the grid.
    pub fn from_parts(
        kind: PlanKind,
        steps: usize,
        corners: Vec<Corner>,
        points: Vec<PlanPoint>,
    ) -> Result<Self> {
        if steps < 2 {
            return Err(Error::PlanSize(steps));
        }
        if corners.len() != kind.corner_count() {
            return Err(Error::Format(format!(
                "{kind} plan needs {} corners, found {}",
                kind.corner_count(),
                corners.len()
            )));
        }
        let expected = kind.point_count(steps);
        if points.len() != expected {
            return Err(Error::Format(format!(
                "{kind} plan with steps={steps} must have {expected} points, found {}",
                points.len()
            )));
        }
        let dim = corners[0].latent.dim();
        let shape = corners[0].conditioning.as_ref().map(ConditioningPair::shape);
        let check = |latent: &LatentCode, cond: &Option<ConditioningPair>, what: &str| {
            if latent.dim() != dim {
                return Err(Error::Format(format!(
                    "{what}: latent dim {} differs from {dim}",
                    latent.dim()
                )));
            }
            if cond.as_ref().map(ConditioningPair::shape) != shape {
                return Err(Error::Format(format!("{what}: conditioning shape differs")));
            }
            Ok(())
        };
        if kind.is_linguistic() != shape.is_some() {
            return Err(Error::Format(format!(
                "{kind} plan {} conditioning",
                if kind.is_linguistic() { "requires" } else { "must not carry" }
            )));
        }
        for (i, c) in corners.iter().enumerate() {
            check(&c.latent, &c.conditioning, &format!("corner {i}"))?;
        }
        let grid = kind.grid(steps)?;
        for (i, (p, mix)) in points.iter().zip(&grid).enumerate() {
            check(&p.latent, &p.conditioning, &format!("point {i}"))?;
            if (p.mix.gamma1 - mix.gamma1).abs() > 1e-12 || (p.mix.gamma2 - mix.gamma2).abs() > 1e-12
            {
                return Err(Error::Format(format!(
                    "point {i} has mix ({}, {}), expected ({}, {})",
                    p.mix.gamma1, p.mix.gamma2, mix.gamma1, mix.gamma2
                )));
            }
        }
        Ok(InterpolationPlan {
            kind,
            steps,
            corners,
            points,
        })
    }

    pub fn kind(&self) -> PlanKind {
        self.kind
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dim(&self) -> usize {
        self.corners[0].latent.dim()
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn points(&self) -> &[PlanPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when every corner is identical, so the plan is constant.
    pub fn has_degenerate_corners(&self) -> bool {
        self.corners.windows(2).all(|w| w[0] == w[1])
    }

    /// Index of the triangular grid point closest to the barycenter
    /// `(1/3, 1/3)`; `None` for pairwise plans.
    pub fn center_index(&self) -> Option<usize> {
        if !self.kind.is_triangular() {
            return None;
        }
        let third = 1.0 / 3.0;
        self.points
            .iter()
            .map(|p| (p.mix.gamma1 - third).powi(2) + (p.mix.gamma2 - third).powi(2))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 2 {
        Err(Error::PlanSize(steps))
    } else {
        Ok(())
    }
}

fn lerp_grid(steps: usize) -> Result<Vec<MixParams>> {
    check_steps(steps)?;
    let denom = (steps - 1) as f64;
    Ok((0..steps)
        .map(|j| MixParams {
            gamma1: j as f64 / denom,
            gamma2: 0.0,
        })
        .collect())
}

/// The triangular grid: every `(j, i) / (steps - 1)` with `i + j <= steps - 1`,
/// ordered by `i` (the `γ2` index) and then `j` (the `γ1` index).
pub fn tri_grid(steps: usize) -> Result<Vec<MixParams>> {
    check_steps(steps)?;
    let last = steps - 1;
    let denom = last as f64;
    let mut grid = Vec::with_capacity(steps * (steps + 1) / 2);
    for i in 0..=last {
        for j in 0..=(last - i) {
            grid.push(MixParams {
                gamma1: j as f64 / denom,
                gamma2: i as f64 / denom,
            });
        }
    }
    Ok(grid)
}

/// Barycentric blend of equally sized vectors. A weight of exactly one
/// returns that input unchanged so corners are reproduced bit for bit.
fn blend(inputs: &[&[f64]], weights: &[f64]) -> Vec<f64> {
    if let Some(k) = weights.iter().position(|&w| w == 1.0) {
        return inputs[k].to_vec();
    }
    let mut out = vec![0.0; inputs[0].len()];
    for (input, &w) in inputs.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(input.iter()) {
            *o += w * v;
        }
    }
    out
}

fn blend_conditioning(pairs: &[&ConditioningPair], weights: &[f64]) -> ConditioningPair {
    let m = pairs[0].words.len();
    let words = (0..m)
        .map(|r| {
            let rows: Vec<&[f64]> = pairs.iter().map(|p| p.words[r].as_slice()).collect();
            blend(&rows, weights)
        })
        .collect();
    let sentences: Vec<&[f64]> = pairs.iter().map(|p| p.sentence.as_slice()).collect();
    ConditioningPair {
        words,
        sentence: blend(&sentences, weights),
    }
}

fn check_latents(codes: &[&LatentCode]) -> Result<()> {
    let dim = codes[0].dim();
    for c in &codes[1..] {
        if c.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: c.dim(),
            });
        }
    }
    Ok(())
}

fn check_conditioning(pairs: &[&ConditioningPair]) -> Result<()> {
    let shape = pairs[0].shape();
    for (i, p) in pairs.iter().enumerate().skip(1) {
        let other = p.shape();
        if other != shape {
            return Err(Error::Shape(format!(
                "conditioning {i} has (words, width, sentence) = {other:?}, expected {shape:?}"
            )));
        }
    }
    Ok(())
}

fn latent_plan(kind: PlanKind, codes: &[&LatentCode], steps: usize) -> Result<InterpolationPlan> {
    check_steps(steps)?;
    check_latents(codes)?;
    let slices: Vec<&[f64]> = codes.iter().map(|c| c.as_slice()).collect();
    let points = kind
        .grid(steps)?
        .into_iter()
        .map(|mix| {
            let w = mix.weights();
            PlanPoint {
                mix,
                latent: LatentCode(blend(&slices, &w[..codes.len()])),
                conditioning: None,
            }
        })
        .collect();
    let corners = codes
        .iter()
        .map(|&c| Corner {
            latent: c.clone(),
            conditioning: None,
        })
        .collect();
    Ok(InterpolationPlan {
        kind,
        steps,
        corners,
        points,
    })
}

fn linguistic_plan(
    kind: PlanKind,
    z: &LatentCode,
    pairs: &[&ConditioningPair],
    steps: usize,
) -> Result<InterpolationPlan> {
    check_steps(steps)?;
    check_conditioning(pairs)?;
    let points = kind
        .grid(steps)?
        .into_iter()
        .map(|mix| {
            let w = mix.weights();
            PlanPoint {
                mix,
                latent: z.clone(),
                conditioning: Some(blend_conditioning(pairs, &w[..pairs.len()])),
            }
        })
        .collect();
    let corners = pairs
        .iter()
        .map(|&c| Corner {
            latent: z.clone(),
            conditioning: Some(c.clone()),
        })
        .collect();
    Ok(InterpolationPlan {
        kind,
        steps,
        corners,
        points,
    })
}

/// `(1 - γ) z0 + γ z1` for `γ = 0, 1/(steps-1), ..., 1`.
pub fn lerp_latent(z0: &LatentCode, z1: &LatentCode, steps: usize) -> Result<InterpolationPlan> {
    latent_plan(PlanKind::LerpLatent, &[z0, z1], steps)
}

/// Blends word and sentence embeddings with a shared `γ` while the latent
/// code stays fixed.
pub fn lerp_linguistic(
    z: &LatentCode,
    c0: &ConditioningPair,
    c1: &ConditioningPair,
    steps: usize,
) -> Result<InterpolationPlan> {
    linguistic_plan(PlanKind::LerpLinguistic, z, &[c0, c1], steps)
}

/// `(1 - γ1 - γ2) z0 + γ1 z1 + γ2 z2` over the triangular grid.
pub fn tri_latent(
    z0: &LatentCode,
    z1: &LatentCode,
    z2: &LatentCode,
    steps: usize,
) -> Result<InterpolationPlan> {
    latent_plan(PlanKind::TriLatent, &[z0, z1, z2], steps)
}

pub fn tri_linguistic(
    z: &LatentCode,
    c0: &ConditioningPair,
    c1: &ConditioningPair,
    c2: &ConditioningPair,
    steps: usize,
) -> Result<InterpolationPlan> {
    linguistic_plan(PlanKind::TriLinguistic, z, &[c0, c1, c2], steps)
}
