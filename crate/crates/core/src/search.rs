//! Candidate enumeration and the two mining algorithms: exhaustive cross-
//! product scoring and mine-and-pair (per-dataset top-k mining followed by
//! cross-product scoring of the surviving candidates).
//!
//! All tie-breaking is lexicographic on descriptions, so results are
//! deterministic and independent of thread count.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::SupportSet;
use crate::data::{selector_support, selectors_for_dataset, Dataset, Description, Selector};
use crate::error::SearchError;
use crate::measures::{
    ex_against, score_pair, size_single, CooksScale, MeasureConfig, ScoreBreakdown, SideEval,
};
use crate::model::{ModelClass, ModelParams, ModelStats, PointBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Exhaustive,
    MineAndPair,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::MineAndPair => "mine_and_pair",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Algorithm::Exhaustive),
            "mine_and_pair" | "mine-and-pair" => Ok(Algorithm::MineAndPair),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// maximum number of selectors per description
    pub max_depth: usize,
    /// minimum relative support in [0, 1)
    pub min_support_rel: f64,
    /// per-dataset top-k kept by the mine step
    pub k_mine: usize,
    /// number of result pairs
    pub k_result: usize,
    /// drop pairs whose descriptions use a common attribute
    pub forbid_shared_attributes: bool,
    /// equal-frequency bins for numeric describing attributes
    pub bins: usize,
    pub measure: MeasureConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 2,
            min_support_rel: 0.005,
            k_mine: 50,
            k_result: 10,
            forbid_shared_attributes: true,
            bins: 5,
            measure: MeasureConfig::default(),
        }
    }
}

impl SearchConfig {
    /// Validate ranges; returns warnings for legal but questionable settings.
    pub fn validate(&self, class: ModelClass) -> Result<Vec<String>, SearchError> {
        if self.max_depth < 1 {
            return Err(SearchError::DegenerateDataset(
                "max_depth must be >= 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.min_support_rel) {
            return Err(SearchError::DegenerateDataset(
                "min_support_rel must lie in [0, 1)".into(),
            ));
        }
        if self.bins == 0 {
            return Err(SearchError::DegenerateDataset("bins must be >= 1".into()));
        }
        self.measure.validate(class)?;
        let mut warnings = Vec::new();
        if self.k_mine < self.k_result {
            warnings.push(format!(
                "k_mine = {} is smaller than k_result = {}",
                self.k_mine, self.k_result
            ));
        }
        Ok(warnings)
    }

    fn min_count(&self, n: usize) -> usize {
        (self.min_support_rel * n as f64).ceil() as usize
    }
}

/// A description with its cached support, sufficient statistics, fitted
/// parameters and per-dataset scores.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub description: Description,
    pub support: SupportSet,
    pub stats: ModelStats,
    pub params: ModelParams,
    /// exceptionality against the candidate's own dataset
    pub ex_score: f64,
    /// size component of the candidate alone
    pub size_score: f64,
}

impl Candidate {
    /// Mine-step quality `size^alpha_s * ex^alpha_e`, reusing the pair
    /// measure's exponents.
    pub fn quality(&self, measure: &MeasureConfig) -> f64 {
        self.size_score.powf(measure.alpha_s) * self.ex_score.powf(measure.alpha_e)
    }
}

#[derive(Debug, Clone)]
pub struct PatternPair {
    pub left: Candidate,
    pub right: Candidate,
    pub breakdown: ScoreBreakdown,
}

/// Per-dataset state shared by every candidate evaluation: borrowed model
/// columns, the population model, and the fixed Cook's scale.
pub struct DatasetContext<'a> {
    pub dataset: &'a Dataset,
    pub class: ModelClass,
    model_cols: Vec<&'a [f64]>,
    pub pop_stats: ModelStats,
    pub pop_params: ModelParams,
    pub cooks: Option<CooksScale>,
}

impl<'a> DatasetContext<'a> {
    pub fn build(
        dataset: &'a Dataset,
        model_attrs: &[String],
        class: ModelClass,
    ) -> Result<Self, SearchError> {
        if model_attrs.len() != class.dim() {
            return Err(SearchError::DegenerateDataset(format!(
                "model class expects {} attributes, got {}",
                class.dim(),
                model_attrs.len()
            )));
        }
        let model_cols = dataset.numeric_columns(model_attrs)?;
        let n = dataset.n_rows();
        let pop_stats = ModelStats::accumulate_columns(class, &model_cols, 0..n)?;
        let pop_params = pop_stats
            .fit()
            .map_err(|e| SearchError::DegenerateDataset(e.to_string()))?;
        let cooks = match (&pop_params, class) {
            (ModelParams::Regression(p), ModelClass::Regression) => {
                let xs = model_cols[0];
                let nf = n as f64;
                let mean_x = xs.iter().sum::<f64>() / nf;
                let mean_xx = xs.iter().map(|x| x * x).sum::<f64>() / nf;
                Some(CooksScale {
                    xtx: [[1.0, mean_x], [mean_x, mean_xx]],
                    s2: p.residual_std * p.residual_std,
                })
            }
            _ => None,
        };
        Ok(DatasetContext {
            dataset,
            class,
            model_cols,
            pop_stats,
            pop_params,
            cooks,
        })
    }

    fn stats_over(&self, support: &SupportSet) -> Result<ModelStats, SearchError> {
        Ok(ModelStats::accumulate_columns(
            self.class,
            &self.model_cols,
            support.iter(),
        )?)
    }

    fn points_over(&self, support: &SupportSet) -> PointBuffer {
        let dim = self.model_cols.len();
        let mut buf = PointBuffer::new(dim);
        buf.data.reserve(dim * support.count());
        for i in support.iter() {
            for col in &self.model_cols {
                buf.data.push(col[i]);
            }
        }
        buf
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationStats {
    /// canonical conjunctions that met the support threshold
    pub generated: usize,
    /// candidates kept with a fitted model
    pub kept: usize,
    /// support-passing conjunctions dropped for a degenerate fit
    pub degenerate_dropped: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningStats {
    pub candidates_left: usize,
    pub candidates_right: usize,
    pub degenerate_dropped_left: usize,
    pub degenerate_dropped_right: usize,
    pub pairs_scored: u64,
    pub pairs_skipped: u64,
}

#[derive(Debug, Clone)]
pub struct MiningOutcome {
    pub pairs: Vec<PatternPair>,
    pub stats: MiningStats,
}

/// Enumerate all canonical conjunctions of depth `1..=max_depth`, pruned by
/// anti-monotone minimum support, each carrying its fitted model and scores.
/// Output is sorted lexicographically by description.
pub fn enumerate_candidates(
    ctx: &DatasetContext,
    cfg: &SearchConfig,
) -> Result<(Vec<Candidate>, EnumerationStats), SearchError> {
    let ds = ctx.dataset;
    if ds.describing().next().is_none() {
        return Err(SearchError::NoDescribingAttributes);
    }
    let n = ds.n_rows();
    let minc = cfg.min_count(n);

    let mut selectors = selectors_for_dataset(ds, cfg.bins)?;
    selectors.sort();
    let supports: Vec<SupportSet> = selectors
        .par_iter()
        .map(|s| selector_support(s, ds))
        .collect::<Result<_, _>>()?;

    // a selector below minimum support cannot appear in any conjunction
    let kept: Vec<usize> = (0..selectors.len())
        .filter(|&i| supports[i].count() >= minc)
        .collect();
    let sels: Vec<&Selector> = kept.iter().map(|&i| &selectors[i]).collect();
    let sups: Vec<&SupportSet> = kept.iter().map(|&i| &supports[i]).collect();

    // first selector index with an attribute strictly greater than sels[i]'s
    let next_attr_start: Vec<usize> = (0..sels.len())
        .map(|i| {
            let attr = &sels[i].attribute;
            sels.partition_point(|s| s.attribute.as_str() <= attr.as_str())
        })
        .collect();

    struct Node {
        sel_indices: Vec<u32>,
        support: SupportSet,
    }

    let mut all_nodes: Vec<Node> = Vec::new();
    let mut frontier: Vec<Node> = (0..sels.len())
        .map(|i| Node {
            sel_indices: vec![i as u32],
            support: sups[i].clone(),
        })
        .collect();

    let sups_ref: &[&SupportSet] = &sups;
    let next_start_ref: &[usize] = &next_attr_start;
    for _depth in 2..=cfg.max_depth {
        let n_sels = sels.len();
        let next: Vec<Node> = frontier
            .par_iter()
            .flat_map_iter(|node| {
                let last = *node.sel_indices.last().expect("nodes are non-empty") as usize;
                (next_start_ref[last]..n_sels).filter_map(move |j| {
                    let support = node.support.intersect(sups_ref[j]);
                    if support.count() < minc {
                        return None;
                    }
                    let mut sel_indices = node.sel_indices.clone();
                    sel_indices.push(j as u32);
                    Some(Node {
                        sel_indices,
                        support,
                    })
                })
            })
            .collect();
        all_nodes.append(&mut frontier);
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    all_nodes.append(&mut frontier);

    let generated = all_nodes.len();
    let measure = &cfg.measure;
    let built: Vec<Option<Candidate>> = all_nodes
        .par_iter()
        .map(|node| -> Option<Candidate> {
            let stats = ctx.stats_over(&node.support).ok()?;
            let params = stats.fit().ok()?;
            let ex_score = ex_against(
                measure.ex_fn,
                &stats,
                &params,
                &ctx.pop_params,
                ctx.cooks.as_ref(),
            )
            .ok()?;
            let size_score = size_single(node.support.count(), n, measure.size_fn);
            let description = Description::new(
                node.sel_indices
                    .iter()
                    .map(|&i| sels[i as usize].clone())
                    .collect(),
            )
            .expect("enumeration emits one selector per attribute");
            Some(Candidate {
                description,
                support: node.support.clone(),
                stats,
                params,
                ex_score,
                size_score,
            })
        })
        .collect();

    let mut candidates: Vec<Candidate> = built.into_iter().flatten().collect();
    let stats = EnumerationStats {
        generated,
        kept: candidates.len(),
        degenerate_dropped: generated - candidates.len(),
    };
    candidates.sort_by(|a, b| a.description.cmp(&b.description));
    Ok((candidates, stats))
}

/// Collapse exact-duplicate descriptions to the highest-quality occurrence,
/// then collapse candidates with identical support sets to the
/// lexicographically smallest description. Output stays sorted by
/// description.
pub fn redundancy_filter(candidates: Vec<Candidate>, measure: &MeasureConfig) -> Vec<Candidate> {
    // duplicate descriptions: keep max quality
    let mut by_desc: Vec<Candidate> = Vec::with_capacity(candidates.len());
    let mut sorted = candidates;
    sorted.sort_by(|a, b| a.description.cmp(&b.description));
    for cand in sorted {
        match by_desc.last_mut() {
            Some(prev) if prev.description == cand.description => {
                if cand.quality(measure) > prev.quality(measure) {
                    *prev = cand;
                }
            }
            _ => by_desc.push(cand),
        }
    }

    // identical supports are fully redundant for scoring: keep the
    // lexicographically smallest description
    let mut best_by_support: HashMap<&[u64], usize> = HashMap::new();
    for (idx, cand) in by_desc.iter().enumerate() {
        match best_by_support.entry(cand.support.blocks()) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(idx);
            }
            std::collections::hash_map::Entry::Occupied(mut e) => {
                if cand.description < by_desc[*e.get()].description {
                    e.insert(idx);
                }
            }
        }
    }
    let mut keep: Vec<usize> = best_by_support.into_values().collect();
    keep.sort_unstable();
    let mut keep_iter = keep.into_iter().peekable();
    by_desc
        .into_iter()
        .enumerate()
        .filter_map(|(idx, cand)| {
            if keep_iter.peek() == Some(&idx) {
                keep_iter.next();
                Some(cand)
            } else {
                None
            }
        })
        .collect()
}

/// Mine step: enumerate, filter redundancy, rank by
/// `size^alpha_s * ex^alpha_e` and keep the top `k_mine`.
pub fn mine_top_k(
    ctx: &DatasetContext,
    cfg: &SearchConfig,
) -> Result<(Vec<Candidate>, EnumerationStats), SearchError> {
    let (candidates, stats) = enumerate_candidates(ctx, cfg)?;
    let candidates = redundancy_filter(candidates, &cfg.measure);
    let mut keyed: Vec<(f64, Candidate)> = candidates
        .into_iter()
        .map(|c| (c.quality(&cfg.measure), c))
        .collect();
    keyed.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| a.1.description.cmp(&b.1.description))
    });
    keyed.truncate(cfg.k_mine);
    Ok((keyed.into_iter().map(|(_, c)| c).collect(), stats))
}

/// Bounded top-k accumulator over scored pairs; the comparator is a strict
/// total order, so merging per-worker accumulators is order-independent.
struct PairTop {
    k: usize,
    entries: Vec<(ScoreBreakdown, u32, u32)>,
    scored: u64,
    skipped: u64,
}

impl PairTop {
    fn new(k: usize) -> Self {
        PairTop {
            k,
            entries: Vec::with_capacity(k.saturating_add(1).min(1024)),
            scored: 0,
            skipped: 0,
        }
    }

    fn insert<F>(&mut self, entry: (ScoreBreakdown, u32, u32), cmp: &F)
    where
        F: Fn(&(ScoreBreakdown, u32, u32), &(ScoreBreakdown, u32, u32)) -> Ordering,
    {
        if self.k == 0 {
            return;
        }
        if self.entries.len() == self.k {
            if cmp(&entry, self.entries.last().expect("non-empty")) != Ordering::Less {
                return;
            }
            self.entries.pop();
        }
        let pos = self.entries.partition_point(|e| cmp(e, &entry) == Ordering::Less);
        self.entries.insert(pos, entry);
    }

    fn merge<F>(mut self, other: PairTop, cmp: &F) -> Self
    where
        F: Fn(&(ScoreBreakdown, u32, u32), &(ScoreBreakdown, u32, u32)) -> Ordering,
    {
        self.scored += other.scored;
        self.skipped += other.skipped;
        for e in other.entries {
            self.insert(e, cmp);
        }
        self
    }
}

/// Score the full cross product of candidates under the pair constraints and
/// return the top `k_result` pairs ordered by total score, ties broken by
/// (left description, right description).
pub fn pair_and_score(
    left: &[Candidate],
    right: &[Candidate],
    ctx_left: &DatasetContext,
    ctx_right: &DatasetContext,
    cfg: &SearchConfig,
) -> Result<(Vec<PatternPair>, u64, u64), SearchError> {
    let measure = &cfg.measure;
    let need_points = measure.needs_points();
    let points_left: Option<Vec<PointBuffer>> = need_points.then(|| {
        left.par_iter()
            .map(|c| ctx_left.points_over(&c.support))
            .collect()
    });
    let points_right: Option<Vec<PointBuffer>> = need_points.then(|| {
        right.par_iter()
            .map(|c| ctx_right.points_over(&c.support))
            .collect()
    });

    fn side_evals<'a>(
        cands: &'a [Candidate],
        points: Option<&'a [PointBuffer]>,
        cooks: Option<&'a CooksScale>,
    ) -> Vec<SideEval<'a>> {
        cands
            .iter()
            .enumerate()
            .map(|(i, c)| SideEval {
                stats: &c.stats,
                params: &c.params,
                size: c.size_score,
                ex: c.ex_score,
                points: points.map(|v| &v[i]),
                cooks,
            })
            .collect()
    }
    let evals_left = side_evals(left, points_left.as_deref(), ctx_left.cooks.as_ref());
    let evals_right = side_evals(right, points_right.as_deref(), ctx_right.cooks.as_ref());

    // total order: score descending, then left/right description ascending
    let cmp = |a: &(ScoreBreakdown, u32, u32), b: &(ScoreBreakdown, u32, u32)| {
        b.0.total
            .total_cmp(&a.0.total)
            .then_with(|| {
                left[a.1 as usize]
                    .description
                    .cmp(&left[b.1 as usize].description)
            })
            .then_with(|| {
                right[a.2 as usize]
                    .description
                    .cmp(&right[b.2 as usize].description)
            })
    };

    let top = (0..left.len())
        .into_par_iter()
        .map(|li| {
            let mut local = PairTop::new(cfg.k_result);
            let lcand = &left[li];
            for (ri, rcand) in right.iter().enumerate() {
                if cfg.forbid_shared_attributes
                    && crate::data::shares_attribute(&lcand.description, &rcand.description)
                {
                    continue;
                }
                match score_pair(measure, &evals_left[li], &evals_right[ri]) {
                    Ok(breakdown) if breakdown.total.is_finite() => {
                        local.scored += 1;
                        local.insert((breakdown, li as u32, ri as u32), &cmp);
                    }
                    _ => local.skipped += 1,
                }
            }
            local
        })
        .reduce(|| PairTop::new(cfg.k_result), |a, b| a.merge(b, &cmp));

    let pairs = top
        .entries
        .into_iter()
        .map(|(breakdown, li, ri)| PatternPair {
            left: left[li as usize].clone(),
            right: right[ri as usize].clone(),
            breakdown,
        })
        .collect();
    Ok((pairs, top.scored, top.skipped))
}

/// Score every candidate pair from full enumerations of both datasets.
pub fn exhaustive_search(
    ctx_left: &DatasetContext,
    ctx_right: &DatasetContext,
    cfg: &SearchConfig,
) -> Result<MiningOutcome, SearchError> {
    let (cands_l, enum_l) = enumerate_candidates(ctx_left, cfg)?;
    let (cands_r, enum_r) = enumerate_candidates(ctx_right, cfg)?;
    let cands_l = redundancy_filter(cands_l, &cfg.measure);
    let cands_r = redundancy_filter(cands_r, &cfg.measure);
    let (pairs, scored, skipped) = pair_and_score(&cands_l, &cands_r, ctx_left, ctx_right, cfg)?;
    Ok(MiningOutcome {
        pairs,
        stats: MiningStats {
            candidates_left: cands_l.len(),
            candidates_right: cands_r.len(),
            degenerate_dropped_left: enum_l.degenerate_dropped,
            degenerate_dropped_right: enum_r.degenerate_dropped,
            pairs_scored: scored,
            pairs_skipped: skipped,
        },
    })
}

/// Mine the per-dataset top-k candidates first, then score their cross
/// product. With `k_mine` at least the candidate count this equals
/// [`exhaustive_search`] element for element.
pub fn mine_and_pair(
    ctx_left: &DatasetContext,
    ctx_right: &DatasetContext,
    cfg: &SearchConfig,
) -> Result<MiningOutcome, SearchError> {
    let (cands_l, enum_l) = mine_top_k(ctx_left, cfg)?;
    let (cands_r, enum_r) = mine_top_k(ctx_right, cfg)?;
    let (pairs, scored, skipped) = pair_and_score(&cands_l, &cands_r, ctx_left, ctx_right, cfg)?;
    Ok(MiningOutcome {
        pairs,
        stats: MiningStats {
            candidates_left: cands_l.len(),
            candidates_right: cands_r.len(),
            degenerate_dropped_left: enum_l.degenerate_dropped,
            degenerate_dropped_right: enum_r.degenerate_dropped,
            pairs_scored: scored,
            pairs_skipped: skipped,
        },
    })
}

/// Build both dataset contexts and run the requested algorithm.
pub fn run_mining(
    algorithm: Algorithm,
    left: &Dataset,
    right: &Dataset,
    model_attrs: &[String],
    class: ModelClass,
    cfg: &SearchConfig,
) -> Result<MiningOutcome, SearchError> {
    cfg.validate(class)?;
    let ctx_left = DatasetContext::build(left, model_attrs, class)?;
    let ctx_right = DatasetContext::build(right, model_attrs, class)?;
    match algorithm {
        Algorithm::Exhaustive => exhaustive_search(&ctx_left, &ctx_right, cfg),
        Algorithm::MineAndPair => mine_and_pair(&ctx_left, &ctx_right, cfg),
    }
}
