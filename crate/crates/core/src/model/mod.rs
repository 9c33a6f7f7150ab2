//! Model classes: mergeable sufficient statistics, closed-form fits and
//! Gaussian log densities for simple linear regression and multivariate
//! covariance models.

mod covariance;
mod regression;

pub use covariance::{CovarianceParams, CovarianceStats};
pub use regression::{RegressionParams, RegressionStats};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Noise floor for the regression residual scale and the covariance ridge,
/// applied before density evaluation so perfectly collinear subgroups stay
/// evaluable.
pub const VARIANCE_FLOOR: f64 = 1e-9;

pub(crate) const LN_2PI: f64 = 1.8378770664093453;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelClass {
    Regression,
    Covariance { m: usize },
}

impl ModelClass {
    /// Number of model-attribute dimensions a point of this class carries.
    pub fn dim(&self) -> usize {
        match self {
            ModelClass::Regression => 2,
            ModelClass::Covariance { m } => *m,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelClass::Regression => "regression",
            ModelClass::Covariance { .. } => "covariance",
        }
    }
}

/// Row-major buffer of model-attribute points with a fixed dimension.
#[derive(Debug, Clone, Default)]
pub struct PointBuffer {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl PointBuffer {
    pub fn new(dim: usize) -> Self {
        PointBuffer {
            dim,
            data: Vec::new(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "ragged point rows");
            data.extend_from_slice(r);
        }
        PointBuffer { dim, data }
    }

    pub fn push(&mut self, point: &[f64]) {
        debug_assert_eq!(point.len(), self.dim);
        self.data.extend_from_slice(point);
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

/// Neumaier compensated accumulator; keeps long sums honest at 1e5+ terms.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Csum {
    s: f64,
    c: f64,
}

impl Csum {
    pub fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Mergeable sufficient statistics for either model class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelStats {
    Regression(RegressionStats),
    Covariance(CovarianceStats),
}

impl ModelStats {
    pub fn zero(class: ModelClass) -> Self {
        match class {
            ModelClass::Regression => ModelStats::Regression(RegressionStats::default()),
            ModelClass::Covariance { m } => ModelStats::Covariance(CovarianceStats::zero(m)),
        }
    }

    /// Exact sums over the given points, accumulated with compensation.
    pub fn accumulate<'a, I>(class: ModelClass, points: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        match class {
            ModelClass::Regression => {
                let mut acc = regression::Accumulator::default();
                for p in points {
                    if p.len() != 2 {
                        return Err(ModelError::DimensionMismatch {
                            expected: 2,
                            got: p.len(),
                        });
                    }
                    acc.add(p[0], p[1]);
                }
                Ok(ModelStats::Regression(acc.finish()))
            }
            ModelClass::Covariance { m } => {
                let mut acc = covariance::Accumulator::new(m);
                for p in points {
                    if p.len() != m {
                        return Err(ModelError::DimensionMismatch {
                            expected: m,
                            got: p.len(),
                        });
                    }
                    acc.add(p);
                }
                Ok(ModelStats::Covariance(acc.finish()))
            }
        }
    }

    /// Accumulate from column-major storage over the given row indices; the
    /// same sums as [`Self::accumulate`] without materializing rows.
    pub fn accumulate_columns(
        class: ModelClass,
        cols: &[&[f64]],
        rows: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ModelError> {
        if cols.len() != class.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: class.dim(),
                got: cols.len(),
            });
        }
        match class {
            ModelClass::Regression => {
                let mut acc = regression::Accumulator::default();
                let (xs, ys) = (cols[0], cols[1]);
                for i in rows {
                    acc.add(xs[i], ys[i]);
                }
                Ok(ModelStats::Regression(acc.finish()))
            }
            ModelClass::Covariance { m } => {
                let mut acc = covariance::Accumulator::new(m);
                let mut scratch = vec![0.0; m];
                for i in rows {
                    for (slot, col) in scratch.iter_mut().zip(cols) {
                        *slot = col[i];
                    }
                    acc.add(&scratch);
                }
                Ok(ModelStats::Covariance(acc.finish()))
            }
        }
    }

    /// Componentwise sum; `merge(a, zero) = a` and merge is commutative.
    pub fn merge(&self, other: &Self) -> Result<Self, ModelError> {
        match (self, other) {
            (ModelStats::Regression(a), ModelStats::Regression(b)) => {
                Ok(ModelStats::Regression(a.merge(b)))
            }
            (ModelStats::Covariance(a), ModelStats::Covariance(b)) => {
                Ok(ModelStats::Covariance(a.merge(b)?))
            }
            _ => Err(ModelError::ClassMismatch),
        }
    }

    pub fn fit(&self) -> Result<ModelParams, ModelError> {
        match self {
            ModelStats::Regression(s) => Ok(ModelParams::Regression(s.fit()?)),
            ModelStats::Covariance(s) => Ok(ModelParams::Covariance(s.fit()?)),
        }
    }

    pub fn n(&self) -> u64 {
        match self {
            ModelStats::Regression(s) => s.n,
            ModelStats::Covariance(s) => s.n,
        }
    }

    pub fn class(&self) -> ModelClass {
        match self {
            ModelStats::Regression(_) => ModelClass::Regression,
            ModelStats::Covariance(s) => ModelClass::Covariance { m: s.m() },
        }
    }
}

/// Fitted parameters for either model class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelParams {
    Regression(RegressionParams),
    Covariance(CovarianceParams),
}

impl ModelParams {
    pub fn class(&self) -> ModelClass {
        match self {
            ModelParams::Regression(_) => ModelClass::Regression,
            ModelParams::Covariance(p) => ModelClass::Covariance { m: p.m() },
        }
    }

    /// Gaussian log density of one point under these parameters.
    ///
    /// For repeated evaluation build a [`DensityEvaluator`] instead.
    pub fn log_density(&self, point: &[f64]) -> Result<f64, ModelError> {
        Ok(DensityEvaluator::new(self)?.log_density(point))
    }
}

/// Precomputed density state: normalization constants for regression, the
/// Cholesky factor and precision of the ridged covariance otherwise.
pub struct DensityEvaluator<'a> {
    params: &'a ModelParams,
    inner: EvaluatorState,
}

enum EvaluatorState {
    Regression {
        sigma: f64,
        ln_norm: f64,
    },
    Covariance {
        mean: DVector<f64>,
        chol_l: DMatrix<f64>,
        precision: DMatrix<f64>,
        log_det: f64,
    },
}

impl<'a> DensityEvaluator<'a> {
    pub fn new(params: &'a ModelParams) -> Result<Self, ModelError> {
        let inner = match params {
            ModelParams::Regression(p) => {
                let sigma = p.residual_std.max(VARIANCE_FLOOR);
                EvaluatorState::Regression {
                    sigma,
                    ln_norm: -0.5 * LN_2PI - sigma.ln(),
                }
            }
            ModelParams::Covariance(p) => {
                let m = p.m();
                let mut cov = DMatrix::from_row_slice(m, m, p.cov());
                for i in 0..m {
                    cov[(i, i)] += VARIANCE_FLOOR;
                }
                let chol = cov.clone().cholesky().ok_or(ModelError::SingularModel)?;
                let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
                EvaluatorState::Covariance {
                    mean: DVector::from_column_slice(p.mean()),
                    precision: chol.inverse(),
                    chol_l: chol.unpack(),
                    log_det,
                }
            }
        };
        Ok(DensityEvaluator { params, inner })
    }

    pub fn log_density(&self, point: &[f64]) -> f64 {
        match (&self.inner, self.params) {
            (EvaluatorState::Regression { sigma, ln_norm }, ModelParams::Regression(p)) => {
                let r = point[1] - (p.intercept + p.slope * point[0]);
                ln_norm - r * r / (2.0 * sigma * sigma)
            }
            (
                EvaluatorState::Covariance {
                    mean,
                    chol_l,
                    log_det,
                    ..
                },
                ModelParams::Covariance(p),
            ) => {
                let m = p.m();
                let dv = DVector::from_column_slice(point) - mean;
                let z = chol_l
                    .solve_lower_triangular(&dv)
                    .expect("cholesky factor is invertible");
                -0.5 * (m as f64 * LN_2PI + log_det + z.norm_squared())
            }
            _ => unreachable!("evaluator state matches params"),
        }
    }

    /// Mean log density of the point set summarized by `stats`, computed in
    /// closed form from the sufficient statistics. Agrees with averaging
    /// [`Self::log_density`] over the underlying points.
    pub fn mean_log_density(&self, stats: &ModelStats) -> Result<f64, ModelError> {
        if stats.n() == 0 {
            return Err(ModelError::DegenerateFit("empty point set".into()));
        }
        let n = stats.n() as f64;
        match (&self.inner, self.params, stats) {
            (
                EvaluatorState::Regression { sigma, ln_norm },
                ModelParams::Regression(p),
                ModelStats::Regression(s),
            ) => {
                let rss = s.residual_sum_of_squares(p.intercept, p.slope);
                Ok(ln_norm - rss / (2.0 * sigma * sigma * n))
            }
            (
                EvaluatorState::Covariance {
                    mean,
                    precision,
                    log_det,
                    ..
                },
                ModelParams::Covariance(p),
                ModelStats::Covariance(s),
            ) => {
                let m = p.m();
                if s.m() != m {
                    return Err(ModelError::DimensionMismatch {
                        expected: m,
                        got: s.m(),
                    });
                }
                // sum_x (x-mu)' P (x-mu) = tr(P * M) with
                // M = SS - s mu' - mu s' + n mu mu'
                let mut quad = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        let mij = s.ss()[i * m + j] - s.s()[i] * mean[j] - mean[i] * s.s()[j]
                            + n * mean[i] * mean[j];
                        quad += precision[(i, j)] * mij;
                    }
                }
                Ok(-0.5 * (m as f64 * LN_2PI + log_det + quad / n))
            }
            _ => Err(ModelError::ClassMismatch),
        }
    }
}
