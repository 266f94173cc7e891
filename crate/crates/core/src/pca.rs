//! Principal component analysis for the pixel baseline.
//!
//! Components come from the symmetric eigendecomposition of the sample
//! covariance. When features outnumber samples the (much smaller) Gram
//! matrix of the centered data is decomposed instead and its eigenvectors
//! are mapped back through the data, which yields the same leading
//! directions.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSource, FeatureTable, LabeledFeatureSet};

/// Default number of components for the pixel baseline.
pub const DEFAULT_COMPONENTS: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub k: usize,
    pub mean: Vec<f64>,
    /// `k × F`, orthonormal rows ordered by explained variance.
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn feature_dim(&self) -> usize {
        self.mean.len()
    }

    /// Checks shapes after deserialization.
    pub fn validate(&self) -> Result<()> {
        let f = self.mean.len();
        if self.k == 0 || self.components.len() != self.k || self.explained_variance.len() != self.k
        {
            return Err(Error::Format(format!(
                "pca model declares k={} but has {} components and {} variances",
                self.k,
                self.components.len(),
                self.explained_variance.len()
            )));
        }
        if self.components.iter().any(|c| c.len() != f) {
            return Err(Error::Format(format!("pca components must have length {f}")));
        }
        Ok(())
    }

    /// `components · (x − mean)`.
    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::Dimension {
                expected: self.mean.len(),
                actual: x.len(),
            });
        }
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(&centered).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `mean + componentsᵀ · y`.
    pub fn reconstruct(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.k {
            return Err(Error::Dimension {
                expected: self.k,
                actual: y.len(),
            });
        }
        let mut out = self.mean.clone();
        for (c, &coef) in self.components.iter().zip(y) {
            for (o, v) in out.iter_mut().zip(c) {
                *o += coef * v;
            }
        }
        Ok(out)
    }

    pub fn transform_table(&self, table: &FeatureTable) -> Result<FeatureTable> {
        let rows = table
            .rows()
            .iter()
            .map(|r| self.transform(r))
            .collect::<Result<Vec<_>>>()?;
        FeatureTable::new(FeatureSource::Pca, self.k, table.ids().to_vec(), rows)
    }

    pub fn transform_set(&self, set: &LabeledFeatureSet) -> Result<LabeledFeatureSet> {
        set.map_features(FeatureSource::Pca, |x| self.transform(x))
    }
}

pub fn fit_pca(train: &LabeledFeatureSet, k: usize) -> Result<PcaModel> {
    let rows: Vec<&[f64]> = train.samples().iter().map(|s| s.features.as_slice()).collect();
    fit_rows(&rows, train.dim(), k)
}

pub fn fit_pca_table(table: &FeatureTable, k: usize) -> Result<PcaModel> {
    let rows: Vec<&[f64]> = table.rows().iter().map(Vec::as_slice).collect();
    fit_rows(&rows, table.dim(), k)
}

/// Fits `k` components to `rows`, each of length `dim`.
pub fn fit_rows(rows: &[&[f64]], dim: usize, k: usize) -> Result<PcaModel> {
    let n = rows.len();
    let limit = dim.min(n.saturating_sub(1));
    if k == 0 || k > limit {
        return Err(Error::DimensionRange(format!(
            "k={k} must be in 1..={limit} for {n} samples of dimension {dim}"
        )));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            actual: r.len(),
        });
    }
    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centered = DMatrix::from_fn(n, dim, |i, j| rows[i][j] - mean[j]);
    let scale = 1.0 / (n - 1) as f64;

    let (values, mut components) = if dim <= n {
        let cov = centered.tr_mul(&centered) * scale;
        let (values, vectors) = sorted_eigen(cov, k);
        let comps = vectors
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect::<Vec<Vec<f64>>>();
        (values, comps)
    } else {
        let gram = &centered * centered.transpose() * scale;
        let (values, vectors) = sorted_eigen(gram, k);
        let basis = DMatrix::from_columns(&vectors);
        // u_i ∝ Xᵀ v_i; null directions are left for orthonormalize to fill
        let mapped = centered.tr_mul(&basis);
        let top = values[0].max(0.0);
        let comps = mapped
            .column_iter()
            .zip(&values)
            .map(|(c, &v)| {
                if v > 1e-12 * top {
                    c.iter().copied().collect()
                } else {
                    vec![0.0; dim]
                }
            })
            .collect::<Vec<Vec<f64>>>();
        (values, comps)
    };

    orthonormalize(&mut components, dim);
    for c in &mut components {
        fix_sign(c);
    }
    Ok(PcaModel {
        k,
        mean,
        components,
        explained_variance: values.into_iter().map(|v| v.max(0.0)).collect(),
    })
}

/// Top-`k` eigenpairs by descending eigenvalue.
fn sorted_eigen(matrix: DMatrix<f64>, k: usize) -> (Vec<f64>, Vec<nalgebra::DVector<f64>>) {
    let eig = SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order.truncate(k);
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    (values, vectors)
}

/// Gram-Schmidt with reorthogonalization. Rows that vanish after projection
/// (zero-variance directions) are replaced by standard basis vectors.
fn orthonormalize(rows: &mut [Vec<f64>], dim: usize) {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut next_basis = 0;
    for i in 0..rows.len() {
        let (done, rest) = rows.split_at_mut(i);
        let row = &mut rest[0];
        let mut scale = norm(row);
        loop {
            for _ in 0..2 {
                for prev in done.iter() {
                    let d: f64 = prev.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
                    for (r, p) in row.iter_mut().zip(prev) {
                        *r -= d * p;
                    }
                }
            }
            let n = norm(row);
            if n > 0.0 && n > 1e-8 * scale {
                row.iter_mut().for_each(|v| *v /= n);
                break;
            }
            *row = vec![0.0; dim];
            row[next_basis] = 1.0;
            next_basis += 1;
            scale = 1.0;
        }
    }
}

/// Makes the largest-magnitude entry positive.
fn fix_sign(c: &mut [f64]) {
    let mut best = 0;
    for (i, v) in c.iter().enumerate() {
        if v.abs() > c[best].abs() {
            best = i;
        }
    }
    if c[best] < 0.0 {
        c.iter_mut().for_each(|v| *v = -*v);
    }
}
