//! Interestingness measure components: subgroup size, model exceptionality,
//! cross-dataset model similarity, and their combination
//! `size^alpha_s * ex^alpha_e * sim`.

use serde::{Deserialize, Serialize};

use crate::error::{MeasureError, ModelError};
use crate::model::{
    DensityEvaluator, ModelClass, ModelParams, ModelStats, PointBuffer, RegressionParams,
};

/// Density floor used by the crossed-likelihood similarity so that far-apart
/// models still compare instead of underflowing to zero.
pub const DENSITY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeFn {
    Relative,
    Absolute,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agg {
    Min,
    Mean,
    GeometricMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExFn {
    ParamDiff,
    LikelihoodGain,
    Cooks,
    #[serde(rename = "matrix_1norm")]
    Matrix1Norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimFn {
    Direct,
    CrossedLikelihood,
    CommonModel,
    CooksCommon,
}

impl std::fmt::Display for SizeFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SizeFn::Relative => "relative",
            SizeFn::Absolute => "absolute",
            SizeFn::Entropy => "entropy",
        })
    }
}

impl std::fmt::Display for ExFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExFn::ParamDiff => "param_diff",
            ExFn::LikelihoodGain => "likelihood_gain",
            ExFn::Cooks => "cooks",
            ExFn::Matrix1Norm => "matrix_1norm",
        })
    }
}

impl std::fmt::Display for SimFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SimFn::Direct => "direct",
            SimFn::CrossedLikelihood => "crossed_likelihood",
            SimFn::CommonModel => "common_model",
            SimFn::CooksCommon => "cooks_common",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeasureConfig {
    pub alpha_s: f64,
    pub alpha_e: f64,
    pub epsilon: f64,
    pub size_fn: SizeFn,
    pub agg: Agg,
    pub ex_fn: ExFn,
    pub sim_fn: SimFn,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            alpha_s: 0.5,
            alpha_e: 1.0,
            epsilon: 1e-6,
            size_fn: SizeFn::Relative,
            agg: Agg::Min,
            ex_fn: ExFn::LikelihoodGain,
            sim_fn: SimFn::CommonModel,
        }
    }
}

impl MeasureConfig {
    /// Check parameter ranges and measure/model-class compatibility.
    pub fn validate(&self, class: ModelClass) -> Result<(), MeasureError> {
        if !(self.alpha_s >= 0.0) || !(self.alpha_e >= 0.0) {
            return Err(MeasureError::Incompatible {
                measure: "alpha exponents must be >= 0".into(),
                class: class.name().into(),
            });
        }
        if !(self.epsilon > 0.0) {
            return Err(MeasureError::Incompatible {
                measure: "epsilon must be > 0".into(),
                class: class.name().into(),
            });
        }
        let incompatible = match class {
            ModelClass::Regression => self.ex_fn == ExFn::Matrix1Norm,
            ModelClass::Covariance { .. } => {
                self.ex_fn == ExFn::Cooks || self.sim_fn == SimFn::CooksCommon
            }
        };
        if incompatible {
            return Err(MeasureError::Incompatible {
                measure: format!("ex={} sim={}", self.ex_fn, self.sim_fn),
                class: class.name().into(),
            });
        }
        Ok(())
    }

    /// True when pair scoring needs the raw subgroup points cached.
    pub fn needs_points(&self) -> bool {
        self.sim_fn == SimFn::CrossedLikelihood
    }
}

/// Size, exceptionality and similarity components with their combined score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub size: f64,
    pub ex: f64,
    pub sim: f64,
    pub total: f64,
}

/// Fixed per-dataset scale for Cook's distance: the second-moment matrix
/// `(1/n) X'X` of the design `[1, x]` over the entire dataset, and the
/// dataset's global residual variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CooksScale {
    /// [[1, mean x], [mean x, mean x^2]]
    pub xtx: [[f64; 2]; 2],
    /// global residual variance s^2 of the dataset fit
    pub s2: f64,
}

/// Size of a single subgroup of `count` instances in a dataset of `n`.
pub fn size_single(count: usize, n: usize, f: SizeFn) -> f64 {
    debug_assert!(n >= 1 && count <= n);
    match f {
        SizeFn::Relative => count as f64 / n as f64,
        SizeFn::Absolute => count as f64,
        SizeFn::Entropy => {
            let p = count as f64 / n as f64;
            let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
            term(p) + term(1.0 - p)
        }
    }
}

/// Aggregate two per-side scores into one.
pub fn agg2(a: f64, b: f64, agg: Agg) -> f64 {
    match agg {
        Agg::Min => a.min(b),
        Agg::Mean => (a + b) / 2.0,
        Agg::GeometricMean => (a * b).sqrt(),
    }
}

/// Sum of absolute parameter differences. Regression compares slope and
/// intercept; covariance models are routed to the matrix 1-norm.
pub fn ex_param_diff(a: &ModelParams, b: &ModelParams) -> Result<f64, MeasureError> {
    match (a, b) {
        (ModelParams::Regression(a), ModelParams::Regression(b)) => {
            Ok((a.slope - b.slope).abs() + (a.intercept - b.intercept).abs())
        }
        (ModelParams::Covariance(a), ModelParams::Covariance(b)) => ex_matrix_1norm(a, b),
        _ => Err(MeasureError::Model(ModelError::ClassMismatch)),
    }
}

/// Entrywise 1-norm of the covariance matrix difference.
pub fn ex_matrix_1norm(
    a: &crate::model::CovarianceParams,
    b: &crate::model::CovarianceParams,
) -> Result<f64, MeasureError> {
    if a.m() != b.m() {
        return Err(MeasureError::Model(ModelError::DimensionMismatch {
            expected: a.m(),
            got: b.m(),
        }));
    }
    Ok(a.cov()
        .iter()
        .zip(b.cov())
        .map(|(x, y)| (x - y).abs())
        .sum())
}

/// Mean log-likelihood gain of `params_sub` over `params_pop` on the given
/// points, clamped below at zero.
pub fn ex_likelihood_gain(
    points: &PointBuffer,
    params_sub: &ModelParams,
    params_pop: &ModelParams,
) -> Result<f64, MeasureError> {
    if points.is_empty() {
        return Err(MeasureError::EmptySubgroup);
    }
    let sub = DensityEvaluator::new(params_sub)?;
    let pop = DensityEvaluator::new(params_pop)?;
    let total: f64 = points
        .iter()
        .map(|p| sub.log_density(p) - pop.log_density(p))
        .sum();
    Ok((total / points.len() as f64).max(0.0))
}

/// [`ex_likelihood_gain`] evaluated in closed form from sufficient statistics;
/// agrees with the pointwise sum up to float tolerance.
pub fn ex_likelihood_gain_stats(
    stats: &ModelStats,
    params_sub: &ModelParams,
    params_pop: &ModelParams,
) -> Result<f64, MeasureError> {
    if stats.n() == 0 {
        return Err(MeasureError::EmptySubgroup);
    }
    let sub = DensityEvaluator::new(params_sub)?.mean_log_density(stats)?;
    let pop = DensityEvaluator::new(params_pop)?.mean_log_density(stats)?;
    Ok((sub - pop).max(0.0))
}

/// Cook's-style influence between two regression fits under a fixed dataset
/// scale: `d' (X'X/n) d / (p s^2)` with `d = (Δintercept, Δslope)` and p = 2.
pub fn ex_cooks(
    a: &RegressionParams,
    b: &RegressionParams,
    scale: &CooksScale,
) -> Result<f64, MeasureError> {
    let s2 = scale.s2.max(VARIANCE_FLOOR_SQ);
    if s2 <= 0.0 {
        return Err(MeasureError::ZeroVariance);
    }
    let d = [a.intercept - b.intercept, a.slope - b.slope];
    let m = &scale.xtx;
    let quad = d[0] * (m[0][0] * d[0] + m[0][1] * d[1]) + d[1] * (m[1][0] * d[0] + m[1][1] * d[1]);
    Ok(quad / (2.0 * s2))
}

const VARIANCE_FLOOR_SQ: f64 = 1e-18;

/// Aggregate the two per-dataset exceptionality scores.
pub fn ex_pair(ex_left: f64, ex_right: f64, agg: Agg) -> f64 {
    agg2(ex_left, ex_right, agg)
}

/// Direct similarity: inverse of the aggregated (possibly asymmetric)
/// exceptionality plus epsilon.
pub fn sim_direct(ex_lr: f64, ex_rl: f64, agg: Agg, epsilon: f64) -> f64 {
    1.0 / (agg2(ex_lr, ex_rl, agg) + epsilon)
}

/// Crossed likelihood: aggregate of the average likelihood of each side's
/// points under the other side's model. Densities are clamped at
/// [`DENSITY_FLOOR`].
pub fn sim_crossed_likelihood(
    points_l: &PointBuffer,
    points_r: &PointBuffer,
    params_l: &ModelParams,
    params_r: &ModelParams,
    agg: Agg,
) -> Result<f64, MeasureError> {
    if points_l.is_empty() || points_r.is_empty() {
        return Err(MeasureError::EmptySubgroup);
    }
    let eval_l = DensityEvaluator::new(params_l)?;
    let eval_r = DensityEvaluator::new(params_r)?;
    let mean_under = |points: &PointBuffer, eval: &DensityEvaluator| -> f64 {
        let total: f64 = points
            .iter()
            .map(|p| eval.log_density(p).exp().max(DENSITY_FLOOR))
            .sum();
        total / points.len() as f64
    };
    Ok(agg2(
        mean_under(points_l, &eval_r),
        mean_under(points_r, &eval_l),
        agg,
    ))
}

/// One side's exceptionality against a reference model (the whole dataset or
/// a union model), dispatched on the configured exceptionality function.
pub fn ex_against(
    ex_fn: ExFn,
    stats: &ModelStats,
    params: &ModelParams,
    reference: &ModelParams,
    cooks: Option<&CooksScale>,
) -> Result<f64, MeasureError> {
    match ex_fn {
        ExFn::ParamDiff => ex_param_diff(params, reference),
        ExFn::Matrix1Norm => match (params, reference) {
            (ModelParams::Covariance(a), ModelParams::Covariance(b)) => ex_matrix_1norm(a, b),
            _ => Err(MeasureError::Model(ModelError::ClassMismatch)),
        },
        ExFn::LikelihoodGain => ex_likelihood_gain_stats(stats, params, reference),
        ExFn::Cooks => match (params, reference) {
            (ModelParams::Regression(a), ModelParams::Regression(b)) => {
                ex_cooks(a, b, cooks.ok_or(MeasureError::ScaleRequired)?)
            }
            _ => Err(MeasureError::Model(ModelError::ClassMismatch)),
        },
    }
}

/// Common-model similarity: fit the union of both subgroups via merged
/// statistics and invert the aggregated per-side exceptionality against it.
#[allow(clippy::too_many_arguments)]
pub fn sim_common_model(
    ex_fn: ExFn,
    stats_l: &ModelStats,
    stats_r: &ModelStats,
    params_l: &ModelParams,
    params_r: &ModelParams,
    agg: Agg,
    epsilon: f64,
    cooks_l: Option<&CooksScale>,
    cooks_r: Option<&CooksScale>,
) -> Result<f64, MeasureError> {
    let union = stats_l.merge(stats_r)?.fit()?;
    let ex_l = ex_against(ex_fn, stats_l, params_l, &union, cooks_l)?;
    let ex_r = ex_against(ex_fn, stats_r, params_r, &union, cooks_r)?;
    Ok(1.0 / (agg2(ex_l, ex_r, agg) + epsilon))
}

/// Cook's common-model similarity: per-side Cook's influence against the
/// union model, each side using its own dataset's fixed scale.
#[allow(clippy::too_many_arguments)]
pub fn sim_cooks_common(
    params_l: &RegressionParams,
    params_r: &RegressionParams,
    params_union: &RegressionParams,
    scale_l: &CooksScale,
    scale_r: &CooksScale,
    agg: Agg,
    epsilon: f64,
) -> Result<f64, MeasureError> {
    let ex_l = ex_cooks(params_l, params_union, scale_l)?;
    let ex_r = ex_cooks(params_r, params_union, scale_r)?;
    Ok(1.0 / (agg2(ex_l, ex_r, agg) + epsilon))
}

/// `size^alpha_s * ex^alpha_e * sim` with `0^0 := 1`, so a zero exponent
/// disables its component entirely.
pub fn interestingness(size: f64, ex: f64, sim: f64, alpha_s: f64, alpha_e: f64) -> f64 {
    size.powf(alpha_s) * ex.powf(alpha_e) * sim
}

/// Everything pair scoring needs to know about one side's candidate.
#[derive(Clone, Copy)]
pub struct SideEval<'a> {
    pub stats: &'a ModelStats,
    pub params: &'a ModelParams,
    /// size component, already passed through the size function
    pub size: f64,
    /// exceptionality against the side's own dataset
    pub ex: f64,
    /// raw subgroup points; required by crossed likelihood
    pub points: Option<&'a PointBuffer>,
    /// fixed dataset scale; required by the Cook's measures
    pub cooks: Option<&'a CooksScale>,
}

/// Score one candidate pair under the configured measure.
pub fn score_pair(
    cfg: &MeasureConfig,
    left: &SideEval,
    right: &SideEval,
) -> Result<ScoreBreakdown, MeasureError> {
    let size = agg2(left.size, right.size, cfg.agg);
    let ex = ex_pair(left.ex, right.ex, cfg.agg);
    let sim = match cfg.sim_fn {
        SimFn::Direct => match cfg.ex_fn {
            // symmetric functions collapse to 1/(ex + eps)
            ExFn::ParamDiff => {
                let d = ex_param_diff(left.params, right.params)?;
                sim_direct(d, d, cfg.agg, cfg.epsilon)
            }
            ExFn::Matrix1Norm => match (left.params, right.params) {
                (ModelParams::Covariance(a), ModelParams::Covariance(b)) => {
                    let d = ex_matrix_1norm(a, b)?;
                    sim_direct(d, d, cfg.agg, cfg.epsilon)
                }
                _ => return Err(MeasureError::Model(ModelError::ClassMismatch)),
            },
            ExFn::LikelihoodGain => {
                let lr = ex_likelihood_gain_stats(left.stats, left.params, right.params)?;
                let rl = ex_likelihood_gain_stats(right.stats, right.params, left.params)?;
                sim_direct(lr, rl, cfg.agg, cfg.epsilon)
            }
            ExFn::Cooks => match (left.params, right.params) {
                (ModelParams::Regression(a), ModelParams::Regression(b)) => {
                    let lr = ex_cooks(a, b, left.cooks.ok_or(MeasureError::ScaleRequired)?)?;
                    let rl = ex_cooks(b, a, right.cooks.ok_or(MeasureError::ScaleRequired)?)?;
                    sim_direct(lr, rl, cfg.agg, cfg.epsilon)
                }
                _ => return Err(MeasureError::Model(ModelError::ClassMismatch)),
            },
        },
        SimFn::CrossedLikelihood => sim_crossed_likelihood(
            left.points.ok_or(MeasureError::PointsRequired)?,
            right.points.ok_or(MeasureError::PointsRequired)?,
            left.params,
            right.params,
            cfg.agg,
        )?,
        SimFn::CommonModel => sim_common_model(
            cfg.ex_fn,
            left.stats,
            right.stats,
            left.params,
            right.params,
            cfg.agg,
            cfg.epsilon,
            left.cooks,
            right.cooks,
        )?,
        SimFn::CooksCommon => match (left.params, right.params) {
            (ModelParams::Regression(a), ModelParams::Regression(b)) => {
                let union = left.stats.merge(right.stats)?.fit()?;
                let ModelParams::Regression(u) = union else {
                    return Err(MeasureError::Model(ModelError::ClassMismatch));
                };
                sim_cooks_common(
                    a,
                    b,
                    &u,
                    left.cooks.ok_or(MeasureError::ScaleRequired)?,
                    right.cooks.ok_or(MeasureError::ScaleRequired)?,
                    cfg.agg,
                    cfg.epsilon,
                )?
            }
            _ => return Err(MeasureError::Model(ModelError::ClassMismatch)),
        },
    };
    let total = interestingness(size, ex, sim, cfg.alpha_s, cfg.alpha_e);
    Ok(ScoreBreakdown {
        size,
        ex,
        sim,
        total,
    })
}
