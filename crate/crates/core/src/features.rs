//! Lag-window design matrices, min-max normalization to `[-1, 1]` and the
//! train/validation/test split.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use chrono::NaiveDateTime;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::aggregate::{Scale, ScaleDataset};
use crate::matrix::Matrix;
use crate::nn::Samples;
use crate::{rng, Error, Result};

/// Which inputs feed the network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub scale: Scale,
    /// Number of preceding periods whose consumption is used.
    pub lag_count: usize,
    pub include_context: bool,
    /// Context columns to include; `None` means all of them.
    pub factor_mask: Option<Vec<String>>,
}

impl FeatureSpec {
    pub fn new(scale: Scale, lag_count: usize, include_context: bool) -> Self {
        Self {
            scale,
            lag_count,
            include_context,
            factor_mask: None,
        }
    }

    /// Same spec with `factor` removed from the context columns.
    pub fn without(&self, factor: &str) -> Result<Self> {
        let mut keep = self.context_columns()?;
        let before = keep.len();
        keep.retain(|c| *c != factor);
        if keep.len() == before {
            return Err(Error::UnknownFactor {
                name: factor.to_string(),
                scale: self.scale.name(),
            });
        }
        Ok(Self {
            factor_mask: Some(keep.into_iter().map(String::from).collect()),
            ..self.clone()
        })
    }

    /// Context columns in schema order, after applying the mask.
    pub fn context_columns(&self) -> Result<Vec<&'static str>> {
        let all = self.scale.context_columns();
        if let Some(mask) = &self.factor_mask {
            if let Some(unknown) = mask.iter().find(|m| !all.contains(&m.as_str())) {
                return Err(Error::UnknownFactor {
                    name: unknown.clone(),
                    scale: self.scale.name(),
                });
            }
        }
        if !self.include_context {
            return Ok(Vec::new());
        }
        Ok(all
            .iter()
            .copied()
            .filter(|c| {
                self.factor_mask
                    .as_ref()
                    .map_or(true, |m| m.iter().any(|x| x == c))
            })
            .collect())
    }

    pub fn width(&self) -> Result<usize> {
        let width = self.lag_count + self.context_columns()?.len();
        if width == 0 {
            return Err(Error::InvalidConfig(
                "feature spec selects no inputs".into(),
            ));
        }
        Ok(width)
    }

    pub fn feature_names(&self) -> Result<Vec<String>> {
        self.width()?;
        let lags = (1..=self.lag_count).rev().map(|k| format!("kwh_lag{k}"));
        Ok(lags
            .chain(self.context_columns()?.into_iter().map(String::from))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub feature_names: Vec<String>,
    pub period_starts: Vec<NaiveDateTime>,
}

impl DesignMatrix {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn width(&self) -> usize {
        self.feature_names.len()
    }

    pub fn samples(&self) -> Samples<'_> {
        Samples {
            x: &self.x,
            y: &self.y,
        }
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(indices),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
            period_starts: indices.iter().map(|&i| self.period_starts[i]).collect(),
        }
    }
}

/// For each row `t ≥ lag_count`: inputs are `kwh(t−lag_count) … kwh(t−1)`
/// followed by the selected context columns of row `t`; the target is
/// `kwh(t)`.
pub fn build_design_matrix(dataset: &ScaleDataset, spec: &FeatureSpec) -> Result<DesignMatrix> {
    if dataset.scale() != spec.scale {
        return Err(Error::ScaleMismatch {
            expected: spec.scale.name(),
            got: dataset.scale().name(),
        });
    }
    let feature_names = spec.feature_names()?;
    let context = spec.context_columns()?;
    if dataset.len() <= spec.lag_count {
        return Err(Error::InsufficientHistory {
            rows: dataset.len(),
            lags: spec.lag_count,
        });
    }
    let columns = dataset.columns();
    let context_idx: Vec<usize> = context
        .iter()
        .map(|c| columns.iter().position(|x| x == c).unwrap())
        .collect();

    let rows: Vec<Vec<f64>> = (0..dataset.len()).map(|i| dataset.values(i)).collect();
    let n = rows.len() - spec.lag_count;
    let mut data = Vec::with_capacity(n * feature_names.len());
    let mut y = Vec::with_capacity(n);
    for t in spec.lag_count..rows.len() {
        data.extend((t - spec.lag_count..t).map(|k| rows[k][0]));
        data.extend(context_idx.iter().map(|&c| rows[t][c]));
        y.push(rows[t][0]);
    }
    if data.iter().chain(&y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("design matrix"));
    }
    Ok(DesignMatrix {
        x: Matrix::from_vec(n, feature_names.len(), data)?,
        y,
        feature_names,
        period_starts: dataset.period_starts()[spec.lag_count..].to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub min: f64,
    pub max: f64,
}

impl MinMax {
    fn fit(values: impl Iterator<Item = f64>) -> Self {
        values.fold(
            Self {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            },
            |acc, v| Self {
                min: acc.min.min(v),
                max: acc.max.max(v),
            },
        )
    }

    pub fn is_constant(&self) -> bool {
        self.max <= self.min
    }

    /// `2(v−min)/(max−min) − 1`, or 0 for a constant column.
    pub fn apply(&self, v: f64) -> f64 {
        if self.is_constant() {
            0.0
        } else {
            2.0 * (v - self.min) / (self.max - self.min) - 1.0
        }
    }

    /// Inverse of [`apply`](Self::apply); a constant column maps back to `min`.
    pub fn invert(&self, v: f64) -> f64 {
        if self.is_constant() {
            self.min
        } else {
            (v + 1.0) * (self.max - self.min) / 2.0 + self.min
        }
    }
}

/// Per-feature and target ranges, fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub features: Vec<MinMax>,
    pub target: MinMax,
    /// Features with `min == max`; these normalize to 0.
    pub constant_features: Vec<usize>,
}

pub fn fit_normalizer(train_x: &Matrix, train_y: &[f64]) -> Result<NormParams> {
    if train_x.rows() != train_y.len() {
        return Err(Error::LengthMismatch {
            left: train_x.rows(),
            right: train_y.len(),
        });
    }
    if train_y.len() < 2 {
        return Err(Error::TooFewRows(train_y.len()));
    }
    let features: Vec<MinMax> = (0..train_x.cols())
        .map(|j| MinMax::fit(train_x.iter_rows().map(|r| r[j])))
        .collect();
    let constant_features: Vec<usize> = features
        .iter()
        .enumerate()
        .filter(|(_, m)| m.is_constant())
        .map(|(j, _)| j)
        .collect();
    if !constant_features.is_empty() {
        log::warn!("constant feature column(s) {constant_features:?} normalize to 0");
    }
    let target = MinMax::fit(train_y.iter().copied());
    if target.is_constant() {
        log::warn!("constant training target normalizes to 0");
    }
    Ok(NormParams {
        features,
        target,
        constant_features,
    })
}

impl NormParams {
    pub fn apply_x(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.features.len() && x.rows() > 0 {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                got: x.cols(),
            });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for (v, m) in out.row_mut(i).iter_mut().zip(&self.features) {
                *v = m.apply(*v);
            }
        }
        Ok(out)
    }

    pub fn apply_y(&self, y: &[f64]) -> Vec<f64> {
        y.iter().map(|&v| self.target.apply(v)).collect()
    }

    pub fn apply(&self, x: &Matrix, y: &[f64]) -> Result<(Matrix, Vec<f64>)> {
        Ok((self.apply_x(x)?, self.apply_y(y)))
    }

    pub fn invert_x(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.features.len() && x.rows() > 0 {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                got: x.cols(),
            });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for (v, m) in out.row_mut(i).iter_mut().zip(&self.features) {
                *v = m.invert(*v);
            }
        }
        Ok(out)
    }

    /// Maps normalized targets back to kWh.
    pub fn invert_target(&self, y_normalized: &[f64]) -> Vec<f64> {
        y_normalized
            .iter()
            .map(|&v| self.target.invert(v))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.70,
            val_fraction: 0.15,
            test_fraction: 0.15,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train_fraction, self.val_fraction, self.test_fraction];
        if parts.iter().any(|f| !f.is_finite() || *f <= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "split fractions must be positive: {parts:?}"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "split fractions sum to {sum}, not 1"
            )));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Row indices of the three parts, each in chronological order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

fn round_half_up(x: f64) -> usize {
    libm::floor(x + 0.5) as usize
}

/// The last `test_fraction` of rows form the test set. Validation rows are
/// drawn uniformly at random from the rest at `val/(1−test)`; the remainder
/// is training data.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<SplitIndices> {
    spec.validate()?;
    let n_test = round_half_up(n as f64 * spec.test_fraction);
    let n_rest = n.saturating_sub(n_test);
    let n_val = round_half_up(n_rest as f64 * spec.val_fraction / (1.0 - spec.test_fraction));
    if n_test == 0 || n_val == 0 || n_val >= n_rest {
        return Err(Error::TooFewRows(n));
    }
    let mut pool: Vec<usize> = (0..n_rest).collect();
    pool.shuffle(&mut rng::seeded(spec.seed));
    let mut val = pool[..n_val].to_vec();
    let mut train = pool[n_val..].to_vec();
    val.sort_unstable();
    train.sort_unstable();
    Ok(SplitIndices {
        train,
        val,
        test: (n_rest..n).collect(),
    })
}

pub fn split(
    matrix: &DesignMatrix,
    spec: &SplitSpec,
) -> Result<(DesignMatrix, DesignMatrix, DesignMatrix)> {
    let idx = split_indices(matrix.len(), spec)?;
    Ok((
        matrix.select(&idx.train),
        matrix.select(&idx.val),
        matrix.select(&idx.test),
    ))
}
