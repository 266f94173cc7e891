//! Soft-margin SVM for the Good/Bad gate.
//!
//! Training solves the dual of
//! `min ½‖w‖² + C Σ max(0, 1 - y_i (w·φ(x_i) + b))`
//! with sequential minimal optimization: each iteration picks the pair of
//! multipliers that violates the KKT conditions most (second-order working
//! set selection) and optimizes it analytically. The bias is not
//! regularized. Iteration stops once the maximal KKT violation drops below
//! the tolerance, which bounds the distance from stationarity.
//!
//! Labels are `+1` for Good and `-1` for Bad; a decision value of exactly
//! zero predicts Bad.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureTable, LabeledFeatureSet, QualityLabel};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum KernelConfig {
    Linear,
    /// `exp(-gamma ‖x - x'‖²)`; `None` means `1 / feature_dim`.
    Rbf { gamma: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub kernel: KernelConfig,
    pub c: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// L2-normalize every feature vector before fitting and predicting.
    pub normalize: bool,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            kernel: KernelConfig::Linear,
            c: 1.0,
            tolerance: 1e-6,
            max_iterations: 10_000,
            seed: 0,
            normalize: true,
        }
    }
}

impl SvmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::Value(format!("C must be positive, got {}", self.c)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Value(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if let KernelConfig::Rbf { gamma: Some(g) } = self.kernel {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::Value(format!("rbf gamma must be positive, got {g}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecisionFunction {
    Linear {
        weights: Vec<f64>,
    },
    Rbf {
        /// `α_i y_i` for every support vector.
        alphas: Vec<f64>,
        support_vectors: Vec<Vec<f64>>,
        gamma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainMeta {
    pub seed: u64,
    pub iterations: usize,
    /// Primal objective `½‖w‖² + C Σ hinge` at the returned solution.
    pub objective: f64,
    /// Dual objective (minimization form) after every iteration; non-increasing.
    pub dual_trace: Vec<f64>,
    /// Maximal KKT violation at termination.
    pub kkt_gap: f64,
    pub support_vectors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    c: f64,
    bias: f64,
    decision: DecisionFunction,
    feature_dim: usize,
    normalize: bool,
    train_meta: TrainMeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: QualityLabel,
    /// Decision value over `‖w‖` for linear models; the raw decision value
    /// for RBF models.
    pub distance: f64,
}

fn normalized(x: &[f64]) -> Vec<f64> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter().map(|v| v / norm).collect()
    } else {
        x.to_vec()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl SvmModel {
    /// A linear model from explicit weights and bias.
    pub fn from_linear(weights: Vec<f64>, bias: f64, normalize: bool) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::DimensionRange("weights must be non-empty".into()));
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Value("model parameters must be finite".into()));
        }
        Ok(SvmModel {
            c: 1.0,
            bias,
            feature_dim: weights.len(),
            decision: DecisionFunction::Linear { weights },
            normalize,
            train_meta: TrainMeta::default(),
        })
    }

    pub(crate) fn from_parts(
        c: f64,
        bias: f64,
        decision: DecisionFunction,
        feature_dim: usize,
        normalize: bool,
        train_meta: TrainMeta,
    ) -> Self {
        SvmModel {
            c,
            bias,
            decision,
            feature_dim,
            normalize,
            train_meta,
        }
    }

    pub fn kernel(&self) -> KernelKind {
        match self.decision {
            DecisionFunction::Linear { .. } => KernelKind::Linear,
            DecisionFunction::Rbf { .. } => KernelKind::Rbf,
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn decision(&self) -> &DecisionFunction {
        &self.decision
    }

    /// Linear weight vector, if the kernel is linear.
    pub fn weights(&self) -> Option<&[f64]> {
        match &self.decision {
            DecisionFunction::Linear { weights } => Some(weights),
            DecisionFunction::Rbf { .. } => None,
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn normalize(&self) -> bool {
        self.normalize
    }

    pub fn train_meta(&self) -> &TrainMeta {
        &self.train_meta
    }

    /// Multiplies weights (or dual coefficients) and bias by `factor`.
    pub fn rescaled(&self, factor: f64) -> Self {
        let decision = match &self.decision {
            DecisionFunction::Linear { weights } => DecisionFunction::Linear {
                weights: weights.iter().map(|w| w * factor).collect(),
            },
            DecisionFunction::Rbf {
                alphas,
                support_vectors,
                gamma,
            } => DecisionFunction::Rbf {
                alphas: alphas.iter().map(|a| a * factor).collect(),
                support_vectors: support_vectors.clone(),
                gamma: *gamma,
            },
        };
        SvmModel {
            decision,
            bias: self.bias * factor,
            ..self.clone()
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_dim {
            return Err(Error::Dimension {
                expected: self.feature_dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Raw decision value `f(x)`.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let owned;
        let x = if self.normalize {
            owned = normalized(x);
            owned.as_slice()
        } else {
            x
        };
        let value = match &self.decision {
            DecisionFunction::Linear { weights } => dot(weights, x),
            DecisionFunction::Rbf {
                alphas,
                support_vectors,
                gamma,
            } => alphas
                .iter()
                .zip(support_vectors)
                .map(|(a, sv)| a * (-gamma * sq_dist(sv, x)).exp())
                .sum(),
        };
        Ok(value + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let value = self.decision_value(x)?;
        let label = if value > 0.0 {
            QualityLabel::Good
        } else {
            QualityLabel::Bad
        };
        let distance = match &self.decision {
            DecisionFunction::Linear { weights } => {
                let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
                if norm > 0.0 {
                    value / norm
                } else {
                    value
                }
            }
            DecisionFunction::Rbf { .. } => value,
        };
        Ok(Prediction { label, distance })
    }
}

/// Free-function form of [`SvmModel::predict`].
pub fn predict(model: &SvmModel, x: &[f64]) -> Result<Prediction> {
    model.predict(x)
}

enum KernelFn {
    Linear,
    Rbf(f64),
}

impl KernelFn {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            KernelFn::Linear => dot(a, b),
            KernelFn::Rbf(gamma) => (-gamma * sq_dist(a, b)).exp(),
        }
    }
}

/// Fits an SVM to `train`.
pub fn train_svm(train: &LabeledFeatureSet, config: &SvmConfig) -> Result<SvmModel> {
    config.validate()?;
    let (good, bad) = train.class_counts();
    if good == 0 || bad == 0 {
        return Err(Error::DegenerateTraining(format!(
            "training needs both classes, got {good} good and {bad} bad"
        )));
    }
    let dim = train.dim();
    if dim == 0 {
        return Err(Error::DimensionRange("features must be non-empty".into()));
    }
    let xs: Vec<Vec<f64>> = train
        .samples()
        .iter()
        .map(|s| {
            if config.normalize {
                normalized(&s.features)
            } else {
                s.features.clone()
            }
        })
        .collect();
    let ys: Vec<f64> = train.samples().iter().map(|s| s.label.sign()).collect();
    let kernel = match config.kernel {
        KernelConfig::Linear => KernelFn::Linear,
        KernelConfig::Rbf { gamma } => KernelFn::Rbf(gamma.unwrap_or(1.0 / dim as f64)),
    };

    let solution = Smo::new(&xs, &ys, &kernel, config.c).solve(config)?;

    let decision = match kernel {
        KernelFn::Linear => {
            let mut weights = vec![0.0; dim];
            for ((x, y), a) in xs.iter().zip(&ys).zip(&solution.alpha) {
                if *a != 0.0 {
                    for (w, v) in weights.iter_mut().zip(x) {
                        *w += a * y * v;
                    }
                }
            }
            DecisionFunction::Linear { weights }
        }
        KernelFn::Rbf(gamma) => {
            let (alphas, support_vectors) = xs
                .iter()
                .zip(&ys)
                .zip(&solution.alpha)
                .filter(|(_, a)| **a > 0.0)
                .map(|((x, y), a)| (a * y, x.clone()))
                .unzip();
            DecisionFunction::Rbf {
                alphas,
                support_vectors,
                gamma,
            }
        }
    };
    let support_vectors = solution.alpha.iter().filter(|a| **a > 0.0).count();
    Ok(SvmModel {
        c: config.c,
        bias: solution.bias,
        decision,
        feature_dim: dim,
        normalize: config.normalize,
        train_meta: TrainMeta {
            seed: config.seed,
            iterations: solution.iterations,
            objective: solution.primal_objective,
            dual_trace: solution.trace,
            kkt_gap: solution.gap,
            support_vectors,
        },
    })
}

struct SmoSolution {
    alpha: Vec<f64>,
    bias: f64,
    iterations: usize,
    primal_objective: f64,
    trace: Vec<f64>,
    gap: f64,
}

/// Dual problem `min ½ αᵀQα - eᵀα` s.t. `0 ≤ α ≤ C`, `yᵀα = 0`, with
/// `Q_ij = y_i y_j K(x_i, x_j)`.
struct Smo<'a> {
    ys: &'a [f64],
    c: f64,
    // full kernel matrix, row-major
    k: Vec<f64>,
    n: usize,
}

impl<'a> Smo<'a> {
    fn new(xs: &[Vec<f64>], ys: &'a [f64], kernel: &KernelFn, c: f64) -> Self {
        let n = xs.len();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval(&xs[i], &xs[j]);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        Smo { ys, c, k, n }
    }

    fn q(&self, i: usize, j: usize) -> f64 {
        self.ys[i] * self.ys[j] * self.k[i * self.n + j]
    }

    fn in_up(&self, alpha: f64, y: f64) -> bool {
        (y > 0.0 && alpha < self.c) || (y < 0.0 && alpha > 0.0)
    }

    fn in_low(&self, alpha: f64, y: f64) -> bool {
        (y > 0.0 && alpha > 0.0) || (y < 0.0 && alpha < self.c)
    }

    fn dual_objective(alpha: &[f64], grad: &[f64]) -> f64 {
        // G = Qα - e  =>  ½αᵀQα - eᵀα = ½ Σ α_i (G_i - 1)
        0.5 * alpha.iter().zip(grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>()
    }

    /// Second-order working set selection. Returns `None` once the maximal
    /// violation is below `eps`, along with the violation.
    fn select(&self, alpha: &[f64], grad: &[f64], eps: f64) -> (Option<(usize, usize)>, f64) {
        let ys = self.ys;
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..self.n {
            if self.in_up(alpha[t], ys[t]) {
                let v = -ys[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best = f64::INFINITY;
        if let Some(i) = i_sel {
            let kii = self.k[i * self.n + i];
            for t in 0..self.n {
                if !self.in_low(alpha[t], ys[t]) {
                    continue;
                }
                let v = ys[t] * grad[t];
                gmax2 = gmax2.max(v);
                let b = gmax + v;
                if b > 0.0 {
                    let mut a = kii + self.k[t * self.n + t] - 2.0 * self.k[i * self.n + t];
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let score = -(b * b) / a;
                    if score < best {
                        best = score;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let gap = gmax + gmax2;
        match (i_sel, j_sel) {
            (Some(i), Some(j)) if gap >= eps => (Some((i, j)), gap),
            _ => (None, gap.max(0.0)),
        }
    }

    fn update_pair(&self, alpha: &mut [f64], grad: &[f64], i: usize, j: usize) {
        let (yi, yj, c) = (self.ys[i], self.ys[j], self.c);
        let kii = self.k[i * self.n + i];
        let kjj = self.k[j * self.n + j];
        let kij = self.k[i * self.n + j];
        let mut quad = kii + kjj - 2.0 * kij;
        if quad <= 0.0 {
            quad = TAU;
        }
        if yi != yj {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
    }

    /// Offset `b` of `f(x) = Σ α_i y_i K(x_i, x) + b`.
    fn bias(&self, alpha: &[f64], grad: &[f64]) -> f64 {
        let mut upper = f64::INFINITY;
        let mut lower = f64::NEG_INFINITY;
        let mut free_sum = 0.0;
        let mut free = 0usize;
        for t in 0..self.n {
            let yg = self.ys[t] * grad[t];
            let y = self.ys[t];
            if alpha[t] >= self.c {
                if y < 0.0 {
                    upper = upper.min(yg);
                } else {
                    lower = lower.max(yg);
                }
            } else if alpha[t] <= 0.0 {
                if y > 0.0 {
                    upper = upper.min(yg);
                } else {
                    lower = lower.max(yg);
                }
            } else {
                free += 1;
                free_sum += yg;
            }
        }
        let rho = if free > 0 {
            free_sum / free as f64
        } else {
            (upper + lower) / 2.0
        };
        -rho
    }

    fn solve(&self, config: &SvmConfig) -> Result<SmoSolution> {
        let n = self.n;
        let mut alpha = vec![0.0; n];
        let mut grad = vec![-1.0; n];
        let mut trace = Vec::new();
        let mut iterations = 0;
        let gap = loop {
            let (pair, gap) = self.select(&alpha, &grad, config.tolerance);
            let Some((i, j)) = pair else {
                break gap;
            };
            if iterations >= config.max_iterations {
                let bias = self.bias(&alpha, &grad);
                return Err(Error::Convergence {
                    iterations,
                    objective: self.primal_objective(&alpha, &grad, bias),
                    gap,
                });
            }
            let (old_i, old_j) = (alpha[i], alpha[j]);
            self.update_pair(&mut alpha, &grad, i, j);
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for (t, g) in grad.iter_mut().enumerate() {
                *g += self.q(t, i) * di + self.q(t, j) * dj;
            }
            iterations += 1;
            trace.push(Self::dual_objective(&alpha, &grad));
        };
        let bias = self.bias(&alpha, &grad);
        Ok(SmoSolution {
            primal_objective: self.primal_objective(&alpha, &grad, bias),
            alpha,
            bias,
            iterations,
            trace,
            gap,
        })
    }

    fn primal_objective(&self, alpha: &[f64], grad: &[f64], bias: f64) -> f64 {
        // (Qα)_i = G_i + 1 and f(x_i) = y_i (Qα)_i + b
        let norm_sq: f64 = alpha.iter().zip(grad).map(|(a, g)| a * (g + 1.0)).sum();
        let hinge: f64 = (0..self.n)
            .map(|i| {
                let f = self.ys[i] * (grad[i] + 1.0) + bias;
                (1.0 - self.ys[i] * f).max(0.0)
            })
            .sum();
        0.5 * norm_sq + self.c * hinge
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    /// Good predicted Good.
    pub true_good: usize,
    /// Bad predicted Good.
    pub false_good: usize,
    /// Bad predicted Bad.
    pub true_bad: usize,
    /// Good predicted Bad.
    pub false_bad: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub id: String,
    pub label: QualityLabel,
    pub predicted: QualityLabel,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub confusion: Confusion,
    pub samples: Vec<SampleResult>,
}

impl EvalReport {
    pub fn correct(&self) -> usize {
        self.confusion.true_good + self.confusion.true_bad
    }
}

pub fn evaluate(model: &SvmModel, test: &LabeledFeatureSet) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::Value("evaluation set is empty".into()));
    }
    let mut confusion = Confusion::default();
    let mut samples = Vec::with_capacity(test.len());
    for s in test.samples() {
        let p = model.predict(&s.features)?;
        match (s.label, p.label) {
            (QualityLabel::Good, QualityLabel::Good) => confusion.true_good += 1,
            (QualityLabel::Bad, QualityLabel::Good) => confusion.false_good += 1,
            (QualityLabel::Bad, QualityLabel::Bad) => confusion.true_bad += 1,
            (QualityLabel::Good, QualityLabel::Bad) => confusion.false_bad += 1,
        }
        samples.push(SampleResult {
            id: s.id.clone(),
            label: s.label,
            predicted: p.label,
            distance: p.distance,
        });
    }
    let correct = confusion.true_good + confusion.true_bad;
    Ok(EvalReport {
        accuracy: correct as f64 / test.len() as f64,
        confusion,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSample {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<QualityLabel>,
    pub predicted: QualityLabel,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    /// Set for RBF models, whose distances are raw decision values.
    pub raw_decision: bool,
    pub samples: Vec<RankedSample>,
}

fn rank<'a>(
    model: &SvmModel,
    rows: impl Iterator<Item = (&'a str, &'a [f64], Option<QualityLabel>)>,
) -> Result<Ranking> {
    let mut samples = rows
        .map(|(id, x, label)| {
            let p = model.predict(x)?;
            Ok(RankedSample {
                id: id.to_string(),
                label,
                predicted: p.label,
                distance: p.distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| b.distance.total_cmp(&a.distance).then_with(|| a.id.cmp(&b.id)));
    Ok(Ranking {
        raw_decision: model.kernel() == KernelKind::Rbf,
        samples,
    })
}

/// Samples sorted by descending signed distance to the boundary, ties by id.
pub fn rank_by_margin(model: &SvmModel, set: &LabeledFeatureSet) -> Result<Ranking> {
    rank(
        model,
        set.samples()
            .iter()
            .map(|s| (s.id.as_str(), s.features.as_slice(), Some(s.label))),
    )
}

/// [`rank_by_margin`] for unlabeled rows.
pub fn rank_table(model: &SvmModel, table: &FeatureTable) -> Result<Ranking> {
    rank(
        model,
        table
            .ids()
            .iter()
            .zip(table.rows())
            .map(|(id, x)| (id.as_str(), x.as_slice(), None)),
    )
}
