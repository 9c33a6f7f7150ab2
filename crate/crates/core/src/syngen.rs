//! Synthetic benchmark generator: paired datasets sharing one background
//! model and a set of implanted exceptional models, each hidden at depth `d`
//! behind polluted indicator columns, plus random noise columns and
//! machine-readable ground truth.
//!
//! All randomness flows through named ChaCha8 streams derived from
//! `(seed, side, purpose)` (see [`derive_stream`]), so identical configs
//! produce byte-identical outputs.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::bitset::SupportSet;
use crate::data::{
    AttrKind, AttrRole, Attribute, ColumnData, Dataset, Description, NominalColumn, Predicate,
    Selector,
};
use crate::error::GenError;
use crate::model::{ModelClass, PointBuffer};

const REJECTION_BUDGET: usize = 10_000;

/// How many pollution points to draw per hiding column of a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pollution {
    /// `ceil(f * implant_size)` per column
    FractionOfImplant(f64),
    /// fixed count per column
    Count(usize),
}

impl Pollution {
    fn per_column(&self, implant_size: usize) -> usize {
        match *self {
            Pollution::FractionOfImplant(f) => (f * implant_size as f64).ceil() as usize,
            Pollution::Count(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub model_class: ModelClass,
    pub seed: u64,
    pub n_implanted: usize,
    /// inclusive range for the background instance count
    pub background_range: (u64, u64),
    /// implant sizes are uniform integers in `[lo*bg, hi*bg]`
    pub implant_frac: (f64, f64),
    /// hiding depth d: number of indicator columns per implanted model
    pub depth: usize,
    pub pollution: Pollution,
    pub n_noise_cols: usize,
    pub noise_p_range: (f64, f64),
}

impl Default for GenConfig {
    fn default() -> Self {
        Self::default_regression(0)
    }
}

impl GenConfig {
    pub fn default_regression(seed: u64) -> Self {
        GenConfig {
            model_class: ModelClass::Regression,
            seed,
            n_implanted: 10,
            background_range: (1_000, 10_000),
            implant_frac: (0.05, 0.10),
            depth: 2,
            pollution: Pollution::FractionOfImplant(0.25),
            n_noise_cols: 10,
            noise_p_range: (0.05, 0.5),
        }
    }

    pub fn default_covariance(seed: u64, m: usize) -> Self {
        GenConfig {
            model_class: ModelClass::Covariance { m },
            background_range: (10_000, 100_000),
            ..Self::default_regression(seed)
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n_implanted == 0 {
            return Err(GenError::InvalidConfig("n_implanted must be >= 1".into()));
        }
        if self.background_range.0 > self.background_range.1 || self.background_range.0 == 0 {
            return Err(GenError::InvalidConfig(format!(
                "background_range [{}, {}] is empty or zero",
                self.background_range.0, self.background_range.1
            )));
        }
        if !(self.implant_frac.0 > 0.0)
            || self.implant_frac.0 > self.implant_frac.1
            || self.implant_frac.1 >= 1.0
        {
            return Err(GenError::InvalidConfig(format!(
                "implant_frac [{}, {}] must satisfy 0 < lo <= hi < 1",
                self.implant_frac.0, self.implant_frac.1
            )));
        }
        if self.depth == 0 {
            return Err(GenError::InvalidConfig("depth must be >= 1".into()));
        }
        match self.pollution {
            Pollution::FractionOfImplant(f) if !(f >= 0.0) => {
                return Err(GenError::InvalidConfig("pollution fraction < 0".into()))
            }
            _ => {}
        }
        if self.noise_p_range.0 < 0.0
            || self.noise_p_range.0 > self.noise_p_range.1
            || self.noise_p_range.1 > 1.0
        {
            return Err(GenError::InvalidConfig(format!(
                "noise_p_range [{}, {}] must lie within [0, 1]",
                self.noise_p_range.0, self.noise_p_range.1
            )));
        }
        if let ModelClass::Covariance { m } = self.model_class {
            if m < 1 {
                return Err(GenError::InvalidConfig("covariance m must be >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn model_attribute_names(&self) -> Vec<String> {
        match self.model_class {
            ModelClass::Regression => vec!["x".into(), "y".into()],
            ModelClass::Covariance { m } => (0..m).map(|i| format!("m{i}")).collect(),
        }
    }
}

/// Model parameters plus realisation parameters. The realisation part (x
/// range and noise scale, or the mean vector) shapes the raw tuples but not
/// the large-sample fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    Regression {
        slope: f64,
        intercept: f64,
        x_range: (f64, f64),
        noise_std: f64,
    },
    Covariance {
        /// row-major m x m covariance (unit diagonal at generation time)
        cov: Vec<f64>,
        mean: Vec<f64>,
    },
}

impl ModelSpec {
    fn dim(&self) -> usize {
        match self {
            ModelSpec::Regression { .. } => 2,
            ModelSpec::Covariance { mean, .. } => mean.len(),
        }
    }
}

/// Draw `n` model-attribute rows from a spec.
pub fn generate_tuples(
    spec: &ModelSpec,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PointBuffer, GenError> {
    let mut buf = PointBuffer::new(spec.dim());
    match spec {
        ModelSpec::Regression {
            slope,
            intercept,
            x_range,
            noise_std,
        } => {
            if !(x_range.0 < x_range.1) {
                return Err(GenError::InvalidConfig(format!(
                    "x_range [{}, {}) is empty",
                    x_range.0, x_range.1
                )));
            }
            if !(*noise_std >= 0.0) {
                return Err(GenError::InvalidConfig("noise_std must be >= 0".into()));
            }
            let xd = Uniform::new(x_range.0, x_range.1)
                .map_err(|e| GenError::InvalidConfig(e.to_string()))?;
            let nd = Normal::new(0.0, *noise_std)
                .map_err(|e| GenError::InvalidConfig(e.to_string()))?;
            for _ in 0..n {
                let x = xd.sample(rng);
                let y = intercept + slope * x + nd.sample(rng);
                buf.push(&[x, y]);
            }
        }
        ModelSpec::Covariance { cov, mean } => {
            let m = mean.len();
            let mat = nalgebra::DMatrix::from_row_slice(m, m, cov);
            let chol = mat
                .cholesky()
                .ok_or_else(|| GenError::InvalidConfig("covariance is not PSD".into()))?;
            let l = chol.l();
            let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
            let mut z = vec![0.0; m];
            let mut row = vec![0.0; m];
            for _ in 0..n {
                for zi in z.iter_mut() {
                    *zi = std_normal.sample(rng);
                }
                for i in 0..m {
                    let mut v = mean[i];
                    for j in 0..=i {
                        v += l[(i, j)] * z[j];
                    }
                    row[i] = v;
                }
                buf.push(&row);
            }
        }
    }
    Ok(buf)
}

fn regression_param_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs() + (a.1 - b.1).abs()
}

fn cov_1norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Random unit-diagonal covariance (a correlation matrix) built as AA' with
/// standard normal entries, normalized to unit diagonal.
fn random_correlation(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    loop {
        let a: Vec<f64> = (0..m * m).map(|_| std_normal.sample(rng)).collect();
        let mut mm = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let mut v = 0.0;
                for k in 0..m {
                    v += a[i * m + k] * a[j * m + k];
                }
                mm[i * m + j] = v;
            }
        }
        if (0..m).any(|i| mm[i * m + i] <= 1e-12) {
            continue;
        }
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    mm[i * m + j] /= (mm[i * m + i] * mm[j * m + j]).sqrt();
                }
            }
        }
        for i in 0..m {
            mm[i * m + i] = 1.0;
        }
        return mm;
    }
}

/// Sample the shared background spec and `n_implanted` exceptional specs.
/// Exceptional parameters are rejection-sampled until they are separated
/// from the background (and, for regression, from each other).
pub fn sample_model_specs(
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(ModelSpec, Vec<ModelSpec>), GenError> {
    match cfg.model_class {
        ModelClass::Regression => {
            let background = ModelSpec::Regression {
                slope: rng.random_range(-1.0..=1.0),
                intercept: rng.random_range(-1.0..=1.0),
                x_range: (0.0, 10.0),
                noise_std: rng.random_range(0.1..0.5),
            };
            let bg_params = match &background {
                ModelSpec::Regression {
                    slope, intercept, ..
                } => (*slope, *intercept),
                _ => unreachable!(),
            };
            let mut accepted: Vec<(f64, f64)> = Vec::new();
            let mut specs = Vec::with_capacity(cfg.n_implanted);
            for _ in 0..cfg.n_implanted {
                let mut found = None;
                for _ in 0..REJECTION_BUDGET {
                    let cand = (
                        rng.random_range(-5.0..=5.0),
                        rng.random_range(-5.0..=5.0),
                    );
                    let far_from_bg = regression_param_dist(cand, bg_params) >= 1.0;
                    let far_from_others = accepted
                        .iter()
                        .all(|&p| regression_param_dist(cand, p) >= 0.5);
                    if far_from_bg && far_from_others {
                        found = Some(cand);
                        break;
                    }
                }
                let (slope, intercept) =
                    found.ok_or(GenError::RejectionBudget(REJECTION_BUDGET))?;
                accepted.push((slope, intercept));
                specs.push(ModelSpec::Regression {
                    slope,
                    intercept,
                    x_range: (0.0, 10.0),
                    noise_std: rng.random_range(0.1..0.5),
                });
            }
            Ok((background, specs))
        }
        ModelClass::Covariance { m } => {
            let bg_cov = random_correlation(m, rng);
            let background = ModelSpec::Covariance {
                cov: bg_cov.clone(),
                mean: vec![0.0; m],
            };
            let mut specs = Vec::with_capacity(cfg.n_implanted);
            for _ in 0..cfg.n_implanted {
                let mut found = None;
                for _ in 0..REJECTION_BUDGET {
                    let cand = random_correlation(m, rng);
                    if cov_1norm(&cand, &bg_cov) >= 2.0 {
                        found = Some(cand);
                        break;
                    }
                }
                let cov = found.ok_or(GenError::RejectionBudget(REJECTION_BUDGET))?;
                specs.push(ModelSpec::Covariance {
                    cov,
                    mean: vec![0.0; m],
                });
            }
            Ok((background, specs))
        }
    }
}

/// Hiding columns for one model, as booleans over all rows. Column `j` is
/// the indicator of `clean ∪ (∪_{k≠j} P_k)` where the pollution `P` (given
/// in draw order) splits into `d` equal chunks `P_k`; the conjunction over
/// all columns recovers exactly the clean set.
pub fn hiding_columns(
    n_rows: usize,
    clean: &[u32],
    pollution: &[u32],
    depth: usize,
) -> Vec<Vec<bool>> {
    assert!(depth >= 1);
    assert_eq!(pollution.len() % depth, 0, "pollution must split evenly");
    let per_column = pollution.len() / depth;
    let mut columns = vec![vec![false; n_rows]; depth];
    for col in columns.iter_mut() {
        for &i in clean {
            col[i as usize] = true;
        }
    }
    for (k, chunk) in pollution.chunks(per_column.max(1)).enumerate().take(depth) {
        for (j, col) in columns.iter_mut().enumerate() {
            if j != k {
                for &i in chunk {
                    col[i as usize] = true;
                }
            }
        }
    }
    columns
}

fn bool_column(values: &[bool]) -> ColumnData {
    let levels: Vec<String> = vec!["0".into(), "1".into()];
    let codes: Vec<u32> = values.iter().map(|&b| u32::from(b)).collect();
    ColumnData::Nominal(NominalColumn::from_codes(codes, levels))
}

/// Sizes, pollution counts and attribute layout drawn for one generated side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideResolution {
    pub background_n: usize,
    pub implant_sizes: Vec<usize>,
    pub pollution_per_column: Vec<usize>,
}

/// The full configuration actually used for a generated pair, including all
/// drawn sizes. Written as `gen_config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedGenConfig {
    pub config: GenConfig,
    pub model_attributes: Vec<String>,
    pub left: SideResolution,
    pub right: SideResolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideTruth {
    pub clean_indices: Vec<u32>,
    pub description: Description,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthModel {
    /// 1-based model id, 0 being the background
    pub id: u32,
    pub spec: ModelSpec,
    pub left: SideTruth,
    pub right: SideTruth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub n_implanted: usize,
    pub models: Vec<GroundTruthModel>,
}

pub struct GeneratedPair {
    pub left: Dataset,
    pub right: Dataset,
    pub truth: GroundTruth,
    pub resolved: ResolvedGenConfig,
}

/// Derive a named ChaCha8 stream from `(seed, side, purpose)`.
///
/// The 256-bit stream key is produced by folding the label bytes into a
/// splitmix64 chain; the generator family and this derivation are fixed, so
/// outputs are reproducible across runs and platforms.
pub fn derive_stream(seed: u64, side: &str, purpose: &str) -> ChaCha8Rng {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut state = splitmix64(seed);
    for b in side.bytes().chain(std::iter::once(0)).chain(purpose.bytes()) {
        state = splitmix64(state ^ u64::from(b));
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

struct SideFrame {
    dataset: Dataset,
    truths: Vec<SideTruth>,
    resolution: SideResolution,
}

fn generate_side(
    cfg: &GenConfig,
    side: &str,
    suffix: &str,
    background: &ModelSpec,
    exceptional: &[ModelSpec],
) -> Result<SideFrame, GenError> {
    let mut sizes_rng = derive_stream(cfg.seed, side, "sizes");
    let mut tuples_rng = derive_stream(cfg.seed, side, "tuples");
    let mut pollution_rng = derive_stream(cfg.seed, side, "pollution");
    let mut noise_rng = derive_stream(cfg.seed, side, "noise");

    // sizes
    let background_n =
        sizes_rng.random_range(cfg.background_range.0..=cfg.background_range.1) as usize;
    let lo = (cfg.implant_frac.0 * background_n as f64).ceil() as u64;
    let hi = (cfg.implant_frac.1 * background_n as f64).floor() as u64;
    if lo > hi || lo == 0 {
        return Err(GenError::InvalidConfig(format!(
            "implant size range [{lo}, {hi}] is empty for background {background_n}"
        )));
    }
    let implant_sizes: Vec<usize> = (0..cfg.n_implanted)
        .map(|_| sizes_rng.random_range(lo..=hi) as usize)
        .collect();

    // stack tuples: background first, then each implant contiguously
    let n_rows = background_n + implant_sizes.iter().sum::<usize>();
    let dim = cfg.model_class.dim();
    let mut model_data = PointBuffer::new(dim);
    model_data.data.reserve(n_rows * dim);
    let bg_points = generate_tuples(background, background_n, &mut tuples_rng)?;
    model_data.data.extend_from_slice(&bg_points.data);
    let mut phenomenon: Vec<u32> = vec![0; background_n];
    let mut clean_ranges: Vec<(u32, u32)> = Vec::with_capacity(cfg.n_implanted);
    let mut offset = background_n as u32;
    for (spec, &size) in exceptional.iter().zip(&implant_sizes) {
        let pts = generate_tuples(spec, size, &mut tuples_rng)?;
        model_data.data.extend_from_slice(&pts.data);
        let model_id = clean_ranges.len() as u32 + 1;
        phenomenon.extend(std::iter::repeat_n(model_id, size));
        clean_ranges.push((offset, offset + size as u32));
        offset += size as u32;
    }

    // hiding columns with pollution
    let mut hiding: Vec<(String, Vec<bool>)> = Vec::with_capacity(cfg.n_implanted * cfg.depth);
    let mut truths = Vec::with_capacity(cfg.n_implanted);
    let mut pollution_per_column = Vec::with_capacity(cfg.n_implanted);
    for (idx, &(start, end)) in clean_ranges.iter().enumerate() {
        let model_id = idx as u32 + 1;
        let clean: Vec<u32> = (start..end).collect();
        let np = cfg.pollution.per_column(clean.len());
        pollution_per_column.push(np);
        let pool: Vec<u32> = (0..n_rows as u32)
            .filter(|i| *i < start || *i >= end)
            .collect();
        let need = np * cfg.depth;
        if need > pool.len() {
            return Err(GenError::InsufficientRows {
                need,
                have: pool.len(),
            });
        }
        let picked: Vec<u32> = rand::seq::index::sample(&mut pollution_rng, pool.len(), need)
            .iter()
            .map(|i| pool[i])
            .collect();
        let columns = hiding_columns(n_rows, &clean, &picked, cfg.depth);
        let mut selectors = Vec::with_capacity(cfg.depth);
        for (j, col) in columns.into_iter().enumerate() {
            let name = format!("phenomenon_{model_id}_{j}{suffix}");
            selectors.push(Selector {
                attribute: name.clone(),
                predicate: Predicate::Equals { value: "1".into() },
            });
            hiding.push((name, col));
        }
        truths.push(SideTruth {
            clean_indices: clean,
            description: Description::new(selectors).expect("distinct hiding attributes"),
        });
    }

    // noise columns
    let mut noise: Vec<(String, Vec<bool>)> = Vec::with_capacity(cfg.n_noise_cols);
    for c in 0..cfg.n_noise_cols {
        let p = if cfg.noise_p_range.0 == cfg.noise_p_range.1 {
            cfg.noise_p_range.0
        } else {
            noise_rng.random_range(cfg.noise_p_range.0..cfg.noise_p_range.1)
        };
        let values: Vec<bool> = (0..n_rows).map(|_| noise_rng.random_bool(p)).collect();
        noise.push((format!("noise_{c}{suffix}"), values));
    }

    // assemble the dataset: model attrs, hidden phenomenon, hiding, noise
    let mut parts: Vec<(Attribute, ColumnData)> = Vec::new();
    let model_names = cfg.model_attribute_names();
    for (d, name) in model_names.iter().enumerate() {
        let col: Vec<f64> = (0..n_rows).map(|i| model_data.data[i * dim + d]).collect();
        parts.push((
            Attribute {
                name: name.clone(),
                kind: AttrKind::Numeric,
                role: AttrRole::Model,
            },
            ColumnData::Numeric(col),
        ));
    }
    {
        let levels: Vec<String> = (0..=cfg.n_implanted as u32).map(|i| i.to_string()).collect();
        let values: Vec<String> = phenomenon.iter().map(|i| levels[*i as usize].clone()).collect();
        parts.push((
            Attribute {
                name: "phenomenon".into(),
                kind: AttrKind::Nominal,
                role: AttrRole::Hidden,
            },
            ColumnData::Nominal(NominalColumn::from_values(&values)),
        ));
    }
    for (name, values) in hiding.into_iter().chain(noise) {
        parts.push((
            Attribute {
                name,
                kind: AttrKind::Nominal,
                role: AttrRole::Describing,
            },
            bool_column(&values),
        ));
    }

    Ok(SideFrame {
        dataset: Dataset::new(side, parts)?,
        truths,
        resolution: SideResolution {
            background_n,
            implant_sizes,
            pollution_per_column,
        },
    })
}

/// Generate the two datasets of a benchmark pair from one shared spec sample.
pub fn generate_pair(cfg: &GenConfig) -> Result<GeneratedPair, GenError> {
    cfg.validate()?;
    let mut spec_rng = derive_stream(cfg.seed, "shared", "specs");
    let (background, exceptional) = sample_model_specs(cfg, &mut spec_rng)?;

    let left = generate_side(cfg, "left", "_L", &background, &exceptional)?;
    let right = generate_side(cfg, "right", "_R", &background, &exceptional)?;

    let models = exceptional
        .into_iter()
        .enumerate()
        .zip(left.truths.into_iter().zip(right.truths))
        .map(|((idx, spec), (l, r))| GroundTruthModel {
            id: idx as u32 + 1,
            spec,
            left: l,
            right: r,
        })
        .collect();

    Ok(GeneratedPair {
        left: left.dataset,
        right: right.dataset,
        truth: GroundTruth {
            n_implanted: cfg.n_implanted,
            models,
        },
        resolved: ResolvedGenConfig {
            config: cfg.clone(),
            model_attributes: cfg.model_attribute_names(),
            left: left.resolution,
            right: right.resolution,
        },
    })
}

/// Write `left.csv`, `right.csv`, `ground_truth.json` and `gen_config.json`
/// into `dir`.
pub fn write_outputs(pair: &GeneratedPair, dir: &Path) -> Result<(), GenError> {
    std::fs::create_dir_all(dir)?;
    crate::data::write_csv(&pair.left, &dir.join("left.csv"))?;
    crate::data::write_csv(&pair.right, &dir.join("right.csv"))?;
    let mut truth = serde_json::to_string_pretty(&pair.truth)?;
    truth.push('\n');
    std::fs::write(dir.join("ground_truth.json"), truth)?;
    let mut resolved = serde_json::to_string_pretty(&pair.resolved)?;
    resolved.push('\n');
    std::fs::write(dir.join("gen_config.json"), resolved)?;
    Ok(())
}

/// Support sets of the clean instance sets, usable for exact matching.
impl GroundTruth {
    pub fn clean_support(&self, model_idx: usize, left: bool, n_rows: usize) -> SupportSet {
        let truth = &self.models[model_idx];
        let side = if left { &truth.left } else { &truth.right };
        SupportSet::from_indices(n_rows, &side.clean_indices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::support;
    use crate::model::ModelStats;
    use approx::assert_relative_eq;

    #[test]
    fn zero_noise_tuples_lie_on_the_line() {
        let spec = ModelSpec::Regression {
            slope: 2.0,
            intercept: 1.0,
            x_range: (0.0, 10.0),
            noise_std: 0.0,
        };
        let mut rng = derive_stream(1, "left", "tuples");
        let pts = generate_tuples(&spec, 3, &mut rng).unwrap();
        assert_eq!(pts.len(), 3);
        for row in pts.iter() {
            assert_relative_eq!(row[1], 2.0 * row[0] + 1.0, epsilon = 1e-12);
        }
        assert!(generate_tuples(&spec, 0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn invalid_spec_rejected() {
        let spec = ModelSpec::Regression {
            slope: 1.0,
            intercept: 0.0,
            x_range: (3.0, 3.0),
            noise_std: 0.1,
        };
        let mut rng = derive_stream(1, "left", "tuples");
        assert!(generate_tuples(&spec, 1, &mut rng).is_err());
    }

    #[test]
    fn large_sample_fit_recovers_parameters() {
        let spec = ModelSpec::Regression {
            slope: 2.0,
            intercept: 1.0,
            x_range: (0.0, 10.0),
            noise_std: 0.1,
        };
        let mut rng = derive_stream(7, "left", "tuples");
        let pts = generate_tuples(&spec, 100_000, &mut rng).unwrap();
        let stats = ModelStats::accumulate(ModelClass::Regression, pts.iter()).unwrap();
        let fit = stats.fit().unwrap();
        match fit {
            crate::model::ModelParams::Regression(p) => {
                assert!((1.98..=2.02).contains(&p.slope), "slope {}", p.slope);
                assert!((p.intercept - 1.0).abs() < 0.02);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn spec_sampling_counts_and_floors() {
        let cfg = GenConfig::default_regression(42);
        let mut rng = derive_stream(cfg.seed, "shared", "specs");
        let (background, exceptional) = sample_model_specs(&cfg, &mut rng).unwrap();
        assert_eq!(exceptional.len(), cfg.n_implanted);
        let params = |s: &ModelSpec| match s {
            ModelSpec::Regression {
                slope, intercept, ..
            } => (*slope, *intercept),
            _ => unreachable!(),
        };
        let bg = params(&background);
        for (i, a) in exceptional.iter().enumerate() {
            assert!(regression_param_dist(params(a), bg) >= 1.0);
            for b in &exceptional[..i] {
                assert!(regression_param_dist(params(a), params(b)) >= 0.5);
            }
        }
    }

    #[test]
    fn covariance_specs_separated_and_unit_diagonal() {
        let cfg = GenConfig {
            n_implanted: 5,
            ..GenConfig::default_covariance(11, 5)
        };
        let mut rng = derive_stream(cfg.seed, "shared", "specs");
        let (background, exceptional) = sample_model_specs(&cfg, &mut rng).unwrap();
        let cov = |s: &ModelSpec| match s {
            ModelSpec::Covariance { cov, .. } => cov.clone(),
            _ => unreachable!(),
        };
        let bg = cov(&background);
        for i in 0..5 {
            assert_eq!(bg[i * 5 + i], 1.0);
        }
        for s in &exceptional {
            let c = cov(s);
            assert!(cov_1norm(&c, &bg) >= 2.0);
            for i in 0..5 {
                assert_eq!(c[i * 5 + i], 1.0);
                for j in 0..5 {
                    assert_eq!(c[i * 5 + j], c[j * 5 + i]);
                }
            }
        }
    }

    #[test]
    fn hiding_columns_worked_example() {
        // clean {0,1,2} in 10 rows, d=2, pollution drawn as [4, 7]:
        // P0={4}, P1={7}; col0 = clean ∪ P1, col1 = clean ∪ P0
        let cols = hiding_columns(10, &[0, 1, 2], &[4, 7], 2);
        let to_set = |col: &Vec<bool>| -> Vec<usize> {
            col.iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect()
        };
        assert_eq!(to_set(&cols[0]), vec![0, 1, 2, 7]);
        assert_eq!(to_set(&cols[1]), vec![0, 1, 2, 4]);

        // zero pollution: both columns equal the clean indicator
        let cols = hiding_columns(10, &[0, 1, 2], &[], 2);
        assert_eq!(to_set(&cols[0]), vec![0, 1, 2]);
        assert_eq!(to_set(&cols[1]), vec![0, 1, 2]);
    }

    #[test]
    fn hiding_conjunction_recovers_clean_set() {
        // random configurations, verified through an independent set-algebra
        // oracle on index sets
        use std::collections::BTreeSet;
        for seed in 0..20 {
            let mut rng = derive_stream(seed, "t", "hide");
            let n_rows = rng.random_range(20..200);
            let clean_len = rng.random_range(1..n_rows / 3);
            let clean: Vec<u32> = (0..clean_len as u32).collect();
            let depth = rng.random_range(1..4);
            let np = rng.random_range(0..(n_rows - clean_len) / depth);
            let pool: Vec<u32> = (clean_len as u32..n_rows as u32).collect();
            let picked: Vec<u32> = rand::seq::index::sample(&mut rng, pool.len(), np * depth)
                .iter()
                .map(|i| pool[i])
                .collect();
            let cols = hiding_columns(n_rows, &clean, &picked, depth);

            let clean_set: BTreeSet<u32> = clean.iter().copied().collect();
            let mut conjunction: Option<BTreeSet<u32>> = None;
            for col in &cols {
                let set: BTreeSet<u32> = col
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &b)| b.then_some(i as u32))
                    .collect();
                assert!(set.is_superset(&clean_set));
                // at depth 1 the single column unions no pollution chunk and
                // equals the clean set by construction
                if np > 0 && depth >= 2 {
                    assert!(set.len() > clean_set.len(), "column must be polluted");
                }
                conjunction = Some(match conjunction {
                    None => set,
                    Some(acc) => acc.intersection(&set).copied().collect(),
                });
            }
            assert_eq!(conjunction.unwrap(), clean_set);
        }
    }

    #[test]
    fn noise_columns_count_and_bounds() {
        let cfg = GenConfig {
            background_range: (300, 400),
            ..GenConfig::default_regression(5)
        };
        let pair = generate_pair(&cfg).unwrap();
        let noise_cols: Vec<&Attribute> = pair
            .left
            .attributes()
            .iter()
            .filter(|a| a.name.starts_with("noise_"))
            .collect();
        assert_eq!(noise_cols.len(), 10);

        // empirical mean within a 3-sigma binomial bound of some p in range
        let n = pair.left.n_rows() as f64;
        for attr in noise_cols {
            let idx = pair.left.attr_index(&attr.name).unwrap();
            if let ColumnData::Nominal(col) = pair.left.column(idx) {
                let ones = col.code_of("1").map_or(0, |c| {
                    col.codes().iter().filter(|&&x| x == c).count()
                });
                let p_hat = ones as f64 / n;
                let (lo, hi) = cfg.noise_p_range;
                let slack = 3.0 * (0.5 * 0.5 / n).sqrt();
                assert!(
                    p_hat >= lo - slack && p_hat <= hi + slack,
                    "noise column mean {p_hat} outside [{lo}, {hi}] + slack"
                );
            }
        }
    }

    #[test]
    fn all_zero_noise_column_is_permitted() {
        let cfg = GenConfig {
            background_range: (100, 100),
            noise_p_range: (0.0, 0.0),
            n_noise_cols: 2,
            ..GenConfig::default_regression(5)
        };
        let pair = generate_pair(&cfg).unwrap();
        let idx = pair.left.attr_index("noise_0_L").unwrap();
        if let ColumnData::Nominal(col) = pair.left.column(idx) {
            assert_eq!(col.levels(), &["0".to_string()]);
        }
    }

    #[test]
    fn generated_pair_layout_and_truth() {
        let cfg = GenConfig {
            background_range: (500, 800),
            ..GenConfig::default_regression(123)
        };
        let pair = generate_pair(&cfg).unwrap();

        // 10 * 2 hiding columns + 10 noise columns per side
        for (ds, suffix) in [(&pair.left, "_L"), (&pair.right, "_R")] {
            let describing: Vec<&Attribute> =
                ds.attributes().iter().filter(|a| a.role == AttrRole::Describing).collect();
            assert_eq!(describing.len(), 30);
            assert!(describing.iter().all(|a| a.name.ends_with(suffix)));
        }

        // ground-truth descriptions' supports equal the clean sets exactly
        for (i, model) in pair.truth.models.iter().enumerate() {
            let s = support(&model.left.description, &pair.left).unwrap();
            assert_eq!(s, pair.truth.clean_support(i, true, pair.left.n_rows()));
            let s = support(&model.right.description, &pair.right).unwrap();
            assert_eq!(s, pair.truth.clean_support(i, false, pair.right.n_rows()));
        }

        // implant sizes respect the configured fractions
        for res in [&pair.resolved.left, &pair.resolved.right] {
            let bg = res.background_n as f64;
            for &s in &res.implant_sizes {
                assert!(s as f64 >= (0.05 * bg).floor());
                assert!(s as f64 <= (0.10 * bg).ceil());
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GenConfig {
            background_range: (200, 300),
            ..GenConfig::default_regression(99)
        };
        let a = generate_pair(&cfg).unwrap();
        let b = generate_pair(&cfg).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        write_outputs(&a, dir_a.path()).unwrap();
        write_outputs(&b, dir_b.path()).unwrap();
        for file in ["left.csv", "right.csv", "ground_truth.json", "gen_config.json"] {
            let x = std::fs::read(dir_a.path().join(file)).unwrap();
            let y = std::fs::read(dir_b.path().join(file)).unwrap();
            assert_eq!(x, y, "{file} differs between identical runs");
        }
    }

    #[test]
    fn realisation_parameters_do_not_move_the_fit() {
        // same model parameters, disjoint x intervals: fits agree within 5%
        let a = ModelSpec::Regression {
            slope: 2.0,
            intercept: 1.0,
            x_range: (0.0, 10.0),
            noise_std: 0.3,
        };
        let b = ModelSpec::Regression {
            slope: 2.0,
            intercept: 1.0,
            x_range: (20.0, 30.0),
            noise_std: 0.3,
        };
        let mut rng = derive_stream(31, "left", "tuples");
        let fit = |spec: &ModelSpec, rng: &mut ChaCha8Rng| {
            let pts = generate_tuples(spec, 100_000, rng).unwrap();
            match ModelStats::accumulate(ModelClass::Regression, pts.iter())
                .unwrap()
                .fit()
                .unwrap()
            {
                crate::model::ModelParams::Regression(p) => p,
                _ => unreachable!(),
            }
        };
        let pa = fit(&a, &mut rng);
        let pb = fit(&b, &mut rng);
        assert!((pa.slope - pb.slope).abs() <= 0.05 * pa.slope.abs().max(pb.slope.abs()));
        assert!(
            (pa.intercept - pb.intercept).abs()
                <= 0.05 * pa.intercept.abs().max(pb.intercept.abs())
        );
    }
}
