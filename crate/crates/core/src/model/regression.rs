//! Simple linear regression: running sums, OLS closed form, residual scale.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::Csum;

/// Running sums over (x, y) pairs. Merging two values sums componentwise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RegressionStats {
    pub n: u64,
    pub sx: f64,
    pub sy: f64,
    pub sxx: f64,
    pub sxy: f64,
    pub syy: f64,
}

#[derive(Default)]
pub(crate) struct Accumulator {
    n: u64,
    sx: Csum,
    sy: Csum,
    sxx: Csum,
    sxy: Csum,
    syy: Csum,
}

impl Accumulator {
    pub fn add(&mut self, x: f64, y: f64) {
        self.n += 1;
        self.sx.add(x);
        self.sy.add(y);
        self.sxx.add(x * x);
        self.sxy.add(x * y);
        self.syy.add(y * y);
    }

    pub fn finish(self) -> RegressionStats {
        RegressionStats {
            n: self.n,
            sx: self.sx.value(),
            sy: self.sy.value(),
            sxx: self.sxx.value(),
            sxy: self.sxy.value(),
            syy: self.syy.value(),
        }
    }
}

impl RegressionStats {
    pub fn merge(&self, other: &Self) -> Self {
        RegressionStats {
            n: self.n + other.n,
            sx: self.sx + other.sx,
            sy: self.sy + other.sy,
            sxx: self.sxx + other.sxx,
            sxy: self.sxy + other.sxy,
            syy: self.syy + other.syy,
        }
    }

    /// Ordinary least squares with an MLE residual scale (divisor n).
    pub fn fit(&self) -> Result<RegressionParams, ModelError> {
        if self.n < 2 {
            return Err(ModelError::DegenerateFit(format!(
                "need at least 2 points, have {}",
                self.n
            )));
        }
        let n = self.n as f64;
        let denom = n * self.sxx - self.sx * self.sx;
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(ModelError::DegenerateFit(
                "x variance is not strictly positive".into(),
            ));
        }
        let slope = (n * self.sxy - self.sx * self.sy) / denom;
        let intercept = (self.sy - slope * self.sx) / n;
        let rss = self.residual_sum_of_squares(intercept, slope).max(0.0);
        Ok(RegressionParams {
            slope,
            intercept,
            residual_std: (rss / n).sqrt(),
        })
    }

    /// Sum of squared residuals of the line `y = a + b x` over the summarized
    /// points, expanded in the sufficient statistics.
    pub fn residual_sum_of_squares(&self, a: f64, b: f64) -> f64 {
        let n = self.n as f64;
        self.syy + n * a * a + b * b * self.sxx - 2.0 * a * self.sy - 2.0 * b * self.sxy
            + 2.0 * a * b * self.sx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionParams {
    pub slope: f64,
    pub intercept: f64,
    pub residual_std: f64,
}
