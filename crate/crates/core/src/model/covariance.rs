//! Multivariate covariance model: sum vector, sum of outer products,
//! population covariance fit.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::Csum;

/// Sum vector and sum-of-outer-products matrix over m-dimensional points.
/// `ss` is row-major m×m and stays exactly symmetric under accumulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceStats {
    pub n: u64,
    s: Vec<f64>,
    ss: Vec<f64>,
}

pub(crate) struct Accumulator {
    n: u64,
    s: Vec<Csum>,
    ss: Vec<Csum>,
}

impl Accumulator {
    pub fn new(m: usize) -> Self {
        Accumulator {
            n: 0,
            s: vec![Csum::default(); m],
            ss: vec![Csum::default(); m * m],
        }
    }

    pub fn add(&mut self, point: &[f64]) {
        let m = self.s.len();
        debug_assert_eq!(point.len(), m);
        self.n += 1;
        for i in 0..m {
            self.s[i].add(point[i]);
            for j in 0..m {
                self.ss[i * m + j].add(point[i] * point[j]);
            }
        }
    }

    pub fn finish(self) -> CovarianceStats {
        CovarianceStats {
            n: self.n,
            s: self.s.iter().map(Csum::value).collect(),
            ss: self.ss.iter().map(Csum::value).collect(),
        }
    }
}

impl CovarianceStats {
    pub fn zero(m: usize) -> Self {
        CovarianceStats {
            n: 0,
            s: vec![0.0; m],
            ss: vec![0.0; m * m],
        }
    }

    pub fn m(&self) -> usize {
        self.s.len()
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn ss(&self) -> &[f64] {
        &self.ss
    }

    pub fn merge(&self, other: &Self) -> Result<Self, ModelError> {
        if self.m() != other.m() {
            return Err(ModelError::DimensionMismatch {
                expected: self.m(),
                got: other.m(),
            });
        }
        Ok(CovarianceStats {
            n: self.n + other.n,
            s: self.s.iter().zip(&other.s).map(|(a, b)| a + b).collect(),
            ss: self.ss.iter().zip(&other.ss).map(|(a, b)| a + b).collect(),
        })
    }

    /// Population covariance: `mean = s/n`, `cov = ss/n - mean mean'`.
    pub fn fit(&self) -> Result<CovarianceParams, ModelError> {
        if self.n < 2 {
            return Err(ModelError::DegenerateFit(format!(
                "need at least 2 points, have {}",
                self.n
            )));
        }
        let m = self.m();
        let n = self.n as f64;
        let mean: Vec<f64> = self.s.iter().map(|v| v / n).collect();
        let mut cov = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let c = self.ss[i * m + j] / n - mean[i] * mean[j];
                // diagonal entries are variances; clamp fp negatives
                cov[i * m + j] = if i == j { c.max(0.0) } else { c };
            }
        }
        Ok(CovarianceParams { mean, cov })
    }
}

/// Mean vector and population covariance matrix (row-major m×m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceParams {
    mean: Vec<f64>,
    cov: Vec<f64>,
}

impl CovarianceParams {
    pub fn new(mean: Vec<f64>, cov: Vec<f64>) -> Self {
        assert_eq!(cov.len(), mean.len() * mean.len(), "cov must be m x m");
        CovarianceParams { mean, cov }
    }

    pub fn m(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &[f64] {
        &self.cov
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn accumulate(points: &[Vec<f64>]) -> CovarianceStats {
        let mut acc = Accumulator::new(points[0].len());
        for p in points {
            acc.add(p);
        }
        acc.finish()
    }

    #[test]
    fn two_point_formula() {
        let stats = accumulate(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let p = stats.fit().unwrap();
        assert_eq!(p.mean(), &[0.5, 0.5]);
        assert_eq!(p.cov(), &[0.25, -0.25, -0.25, 0.25]);
    }

    #[test]
    fn repeated_point_gives_zero_matrix() {
        let stats = accumulate(&vec![vec![2.0, -1.0, 3.0]; 7]);
        let p = stats.fit().unwrap();
        assert!(p.cov().iter().all(|&c| c.abs() < 1e-12));
    }

    #[test]
    fn n_below_two_degenerate() {
        assert!(CovarianceStats::zero(3).fit().is_err());
        assert!(accumulate(&[vec![1.0, 2.0]]).fit().is_err());
    }

    #[test]
    fn matches_two_pass_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = 4;
        let points: Vec<Vec<f64>> = (0..200)
            .map(|_| (0..m).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        let p = accumulate(&points).fit().unwrap();

        // two-pass oracle: mean first, then centered products
        let n = points.len() as f64;
        let mut mean = vec![0.0; m];
        for pt in &points {
            for i in 0..m {
                mean[i] += pt[i];
            }
        }
        for v in &mut mean {
            *v /= n;
        }
        for i in 0..m {
            for j in 0..m {
                let c: f64 = points
                    .iter()
                    .map(|pt| (pt[i] - mean[i]) * (pt[j] - mean[j]))
                    .sum::<f64>()
                    / n;
                assert_relative_eq!(
                    p.cov()[i * m + j],
                    c,
                    max_relative = 1e-9,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn symmetry_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = 5;
        let points: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..m).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let p = accumulate(&points).fit().unwrap();
        for i in 0..m {
            for j in 0..m {
                assert_eq!(p.cov()[i * m + j], p.cov()[j * m + i]);
            }
        }
    }
}
