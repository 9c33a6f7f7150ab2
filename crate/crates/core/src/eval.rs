//! Ground-truth matching, recall@k, and multi-seed experiment sweeps over
//! measures, exponents and algorithms.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{support, Dataset, Description};
use crate::error::EvalError;
use crate::measures::{ExFn, SimFn};
use crate::search::{run_mining, Algorithm, PatternPair, SearchConfig};
use crate::syngen::{generate_pair, GenConfig, GroundTruth};

/// How result supports are compared against the implanted clean sets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// exact support-set equality (the default)
    #[default]
    Exact,
    /// both sides reach at least this Jaccard index with the clean sets;
    /// among qualifying models the one with the highest minimum Jaccard
    /// wins, ties resolved to the smallest model id
    Jaccard(f64),
}

fn jaccard(a: &crate::SupportSet, b: &crate::SupportSet) -> f64 {
    let inter = a.intersect(b).count();
    let union = a.count() + b.count() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Match one description pair against the implanted models: `Some(id)` iff
/// both supports equal the same model's clean sets exactly (support-set
/// equality, not syntactic equality).
pub fn match_descriptions(
    left_desc: &Description,
    right_desc: &Description,
    truth: &GroundTruth,
    left: &Dataset,
    right: &Dataset,
) -> Result<Option<u32>, EvalError> {
    match_descriptions_with(MatchMode::Exact, left_desc, right_desc, truth, left, right)
}

/// [`match_descriptions`] with a configurable comparison mode.
pub fn match_descriptions_with(
    mode: MatchMode,
    left_desc: &Description,
    right_desc: &Description,
    truth: &GroundTruth,
    left: &Dataset,
    right: &Dataset,
) -> Result<Option<u32>, EvalError> {
    let supp_l = support(left_desc, left)?;
    let supp_r = support(right_desc, right)?;
    match mode {
        MatchMode::Exact => {
            for (idx, model) in truth.models.iter().enumerate() {
                if supp_l.count() != model.left.clean_indices.len()
                    || supp_r.count() != model.right.clean_indices.len()
                {
                    continue;
                }
                if supp_l == truth.clean_support(idx, true, left.n_rows())
                    && supp_r == truth.clean_support(idx, false, right.n_rows())
                {
                    return Ok(Some(model.id));
                }
            }
            Ok(None)
        }
        MatchMode::Jaccard(threshold) => {
            let mut best: Option<(f64, u32)> = None;
            for (idx, model) in truth.models.iter().enumerate() {
                let jl = jaccard(&supp_l, &truth.clean_support(idx, true, left.n_rows()));
                let jr = jaccard(&supp_r, &truth.clean_support(idx, false, right.n_rows()));
                let score = jl.min(jr);
                if score >= threshold && best.is_none_or(|(b, _)| score > b) {
                    best = Some((score, model.id));
                }
            }
            Ok(best.map(|(_, id)| id))
        }
    }
}

pub fn match_pair(
    pair: &PatternPair,
    truth: &GroundTruth,
    left: &Dataset,
    right: &Dataset,
) -> Result<Option<u32>, EvalError> {
    match_descriptions(
        &pair.left.description,
        &pair.right.description,
        truth,
        left,
        right,
    )
}

/// Matched model id per result rank.
pub fn match_ranks(
    results: &[PatternPair],
    truth: &GroundTruth,
    left: &Dataset,
    right: &Dataset,
) -> Result<Vec<Option<u32>>, EvalError> {
    results
        .iter()
        .map(|p| match_pair(p, truth, left, right))
        .collect()
}

/// Fraction of implanted models matched by at least one of the first `k`
/// result pairs.
pub fn recall_at_k(
    results: &[PatternPair],
    truth: &GroundTruth,
    left: &Dataset,
    right: &Dataset,
    k: usize,
) -> Result<f64, EvalError> {
    let upto = results.len().min(k);
    let ranks = match_ranks(&results[..upto], truth, left, right)?;
    recall_from_ranks(&ranks, truth.n_implanted, k)
}

/// Recall from precomputed per-rank matches.
pub fn recall_from_ranks(
    ranks: &[Option<u32>],
    n_implanted: usize,
    k: usize,
) -> Result<f64, EvalError> {
    if n_implanted == 0 {
        return Err(EvalError::InvalidGrid("n_implanted is zero".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for id in ranks.iter().take(k).flatten() {
        seen.insert(*id);
    }
    Ok(seen.len() as f64 / n_implanted as f64)
}

/// Grid of measure variants and algorithms, evaluated over `n_seeds`
/// generated dataset pairs each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentGrid {
    pub alpha_s: Vec<f64>,
    pub alpha_e: Vec<f64>,
    pub sim_fns: Vec<SimFn>,
    pub ex_fns: Vec<ExFn>,
    pub algorithms: Vec<Algorithm>,
    pub n_seeds: usize,
    pub master_seed: u64,
    pub recall_k: usize,
    /// when false, the runtime column is written as zero so repeated sweeps
    /// are byte-identical
    pub measure_runtime: bool,
    pub gen: GenConfig,
    pub search: SearchConfig,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        let search = SearchConfig::default();
        ExperimentGrid {
            alpha_s: vec![search.measure.alpha_s],
            alpha_e: vec![search.measure.alpha_e],
            sim_fns: vec![search.measure.sim_fn],
            ex_fns: vec![search.measure.ex_fn],
            algorithms: vec![Algorithm::MineAndPair],
            n_seeds: 10,
            master_seed: 0,
            recall_k: 10,
            measure_runtime: true,
            gen: GenConfig::default(),
            search,
        }
    }
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.alpha_s.is_empty()
            || self.alpha_e.is_empty()
            || self.sim_fns.is_empty()
            || self.ex_fns.is_empty()
            || self.algorithms.is_empty()
        {
            return Err(EvalError::InvalidGrid("a grid axis is empty".into()));
        }
        if self.n_seeds == 0 {
            return Err(EvalError::InvalidGrid("n_seeds must be >= 1".into()));
        }
        self.gen.validate().map_err(EvalError::Gen)?;
        Ok(())
    }

    /// Seeds are derived deterministically from the master seed.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.n_seeds as u64)
            .map(|i| self.master_seed.wrapping_add(i))
            .collect()
    }

    fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &alpha_s in &self.alpha_s {
            for &alpha_e in &self.alpha_e {
                for &sim_fn in &self.sim_fns {
                    for &ex_fn in &self.ex_fns {
                        for &algorithm in &self.algorithms {
                            out.push(GridPoint {
                                alpha_s,
                                alpha_e,
                                sim_fn,
                                ex_fn,
                                algorithm,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridPoint {
    alpha_s: f64,
    alpha_e: f64,
    sim_fn: SimFn,
    ex_fn: ExFn,
    algorithm: Algorithm,
}

/// One sweep result row; statistics aggregate the seeds that succeeded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha_s: f64,
    pub alpha_e: f64,
    pub sim_fn: SimFn,
    pub ex_fn: ExFn,
    pub algorithm: Algorithm,
    pub mean_recall: f64,
    pub std_recall: f64,
    pub mean_runtime_s: f64,
    #[serde(skip)]
    pub n_failed: usize,
    #[serde(skip)]
    pub first_error: Option<String>,
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Run every grid point over every seed: generate, mine, score recall@k.
/// Failures are recorded per row instead of aborting the sweep. Progress is
/// logged via the `progress` callback (one call per finished run).
pub fn run_experiment(
    grid: &ExperimentGrid,
    mut progress: impl FnMut(&str),
) -> Result<Vec<SweepRow>, EvalError> {
    grid.validate()?;
    let points = grid.points();
    let seeds = grid.seeds();
    let model_attrs = grid.gen.model_attribute_names();
    let class = grid.gen.model_class;

    // recalls[point][seed]
    let mut recalls: Vec<Vec<f64>> = vec![Vec::new(); points.len()];
    let mut runtimes: Vec<Vec<f64>> = vec![Vec::new(); points.len()];
    let mut failures: Vec<(usize, String)> = Vec::new();

    for (si, &seed) in seeds.iter().enumerate() {
        let gen_cfg = GenConfig {
            seed,
            ..grid.gen.clone()
        };
        let pair = generate_pair(&gen_cfg)?;
        for (pi, point) in points.iter().enumerate() {
            let mut search = grid.search;
            search.measure.alpha_s = point.alpha_s;
            search.measure.alpha_e = point.alpha_e;
            search.measure.sim_fn = point.sim_fn;
            search.measure.ex_fn = point.ex_fn;

            let started = Instant::now();
            let outcome = run_mining(
                point.algorithm,
                &pair.left,
                &pair.right,
                &model_attrs,
                class,
                &search,
            );
            let elapsed = started.elapsed().as_secs_f64();
            match outcome {
                Ok(out) => {
                    let recall =
                        recall_at_k(&out.pairs, &pair.truth, &pair.left, &pair.right, grid.recall_k)?;
                    recalls[pi].push(recall);
                    runtimes[pi].push(elapsed);
                    progress(&format!(
                        "seed {}/{} point {}/{}: recall@{} = {recall:.3}",
                        si + 1,
                        seeds.len(),
                        pi + 1,
                        points.len(),
                        grid.recall_k
                    ));
                }
                Err(err) => {
                    progress(&format!(
                        "seed {}/{} point {}/{}: failed: {err}",
                        si + 1,
                        seeds.len(),
                        pi + 1,
                        points.len()
                    ));
                    failures.push((pi, err.to_string()));
                }
            }
        }
    }

    let rows = points
        .iter()
        .enumerate()
        .map(|(pi, point)| {
            let (mean_recall, std_recall) = mean_std(&recalls[pi]);
            let (mean_runtime_s, _) = mean_std(&runtimes[pi]);
            let point_failures: Vec<&String> = failures
                .iter()
                .filter(|(i, _)| *i == pi)
                .map(|(_, e)| e)
                .collect();
            SweepRow {
                alpha_s: point.alpha_s,
                alpha_e: point.alpha_e,
                sim_fn: point.sim_fn,
                ex_fn: point.ex_fn,
                algorithm: point.algorithm,
                mean_recall,
                std_recall,
                mean_runtime_s: if grid.measure_runtime && !runtimes[pi].is_empty() {
                    mean_runtime_s
                } else {
                    0.0
                },
                n_failed: point_failures.len(),
                first_error: point_failures.first().map(|e| e.to_string()),
            }
        })
        .collect();
    Ok(rows)
}

/// Write the sweep as CSV with one row per grid point.
pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "alpha_s",
        "alpha_e",
        "sim_fn",
        "ex_fn",
        "algorithm",
        "mean_recall",
        "std_recall",
        "mean_runtime_s",
    ])?;
    for r in rows {
        w.write_record([
            format!("{}", r.alpha_s),
            format!("{}", r.alpha_e),
            r.sim_fn.to_string(),
            r.ex_fn.to_string(),
            r.algorithm.to_string(),
            format!("{}", r.mean_recall),
            format!("{}", r.std_recall),
            format!("{}", r.mean_runtime_s),
        ])?;
    }
    w.flush().map_err(EvalError::Io)?;
    Ok(())
}
