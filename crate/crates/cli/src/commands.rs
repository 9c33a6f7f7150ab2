//! The four subcommands: generate, mine, evaluate, sweep.

use std::path::Path;

use rdmm_core::data::load_dataset;
use rdmm_core::eval::{self, recall_from_ranks, ExperimentGrid};
use rdmm_core::search::{run_mining, Algorithm};
use rdmm_core::syngen::{generate_pair, write_outputs, GenConfig, GroundTruth};

use crate::config::RunConfig;
use crate::report::{sha256_hex, write_json, EvalFile, ResultsFile};
use crate::CliError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {what} `{}`: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("invalid {what} `{}`: {e}", path.display())))
}

/// `generate`: synthesize a benchmark pair and write `left.csv`,
/// `right.csv`, `ground_truth.json`, `gen_config.json`, plus a ready-to-mine
/// `run_config.json`.
pub fn generate(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let cfg: GenConfig = read_json(config_path, "generator config")?;
    cfg.validate()?;
    let pair = generate_pair(&cfg)?;
    write_outputs(&pair, out_dir)?;

    let run = RunConfig {
        model_class: cfg.model_class,
        model_attributes: pair.resolved.model_attributes.clone(),
        left_schema: RunConfig::schema_of(&pair.left),
        right_schema: RunConfig::schema_of(&pair.right),
        search: Default::default(),
    };
    write_json(&run, &out_dir.join("run_config.json"))?;

    eprintln!(
        "generated pair: left {} rows, right {} rows, {} implanted models -> {}",
        pair.left.n_rows(),
        pair.right.n_rows(),
        cfg.n_implanted,
        out_dir.display()
    );
    Ok(())
}

pub struct MineArgs<'a> {
    pub left: &'a Path,
    pub right: &'a Path,
    pub config: &'a Path,
    pub algorithm: Algorithm,
    pub top_k: Option<usize>,
    pub output: &'a Path,
}

/// `mine`: load both datasets, run the requested algorithm, write the
/// ordered pair list as `results.json`.
pub fn mine(args: MineArgs) -> Result<(), CliError> {
    let mut config: RunConfig = read_json(args.config, "run config")?;
    if let Some(k) = args.top_k {
        config.search.k_result = k;
    }
    let warnings = config.validate()?;
    for w in warnings {
        eprintln!("warning: {w}");
    }

    let left = load_dataset(args.left, "left", &config.left_schema)?;
    let right = load_dataset(args.right, "right", &config.right_schema)?;

    let outcome = run_mining(
        args.algorithm,
        &left,
        &right,
        &config.model_attributes,
        config.model_class,
        &config.search,
    )?;

    let results = ResultsFile::from_pairs(
        VERSION,
        args.algorithm,
        args.left,
        args.right,
        config,
        outcome.stats,
        &outcome.pairs,
    )?;
    write_json(&results, args.output)?;
    eprintln!(
        "mined {} pairs ({} candidates x {} candidates, {} scored) -> {}",
        results.pairs.len(),
        outcome.stats.candidates_left,
        outcome.stats.candidates_right,
        outcome.stats.pairs_scored,
        args.output.display()
    );
    Ok(())
}

pub struct EvaluateArgs<'a> {
    pub results: &'a Path,
    pub ground_truth: &'a Path,
    pub left: &'a Path,
    pub right: &'a Path,
    pub k: usize,
    pub output: &'a Path,
}

/// `evaluate`: match each result pair against the implanted models and print
/// `recall@K = x.xxx`.
pub fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let results: ResultsFile = read_json(args.results, "results file")?;
    let truth: GroundTruth = read_json(args.ground_truth, "ground truth")?;

    for (side, path, stored) in [
        ("left", args.left, &results.left_sha256),
        ("right", args.right, &results.right_sha256),
    ] {
        let actual = sha256_hex(path)?;
        if &actual != stored {
            return Err(CliError::Input(format!(
                "{side} dataset hash mismatch: results were mined from a different file \
                 (stored {stored}, found {actual})"
            )));
        }
    }

    let left = load_dataset(args.left, "left", &results.config.left_schema)?;
    let right = load_dataset(args.right, "right", &results.config.right_schema)?;

    let matches: Vec<Option<u32>> = results
        .pairs
        .iter()
        .map(|p| {
            eval::match_descriptions(
                &p.left.description,
                &p.right.description,
                &truth,
                &left,
                &right,
            )
            .map_err(CliError::from)
        })
        .collect::<Result<_, _>>()?;

    let recall = recall_from_ranks(&matches, truth.n_implanted, args.k)?;
    println!("recall@{} = {recall:.3}", args.k);
    write_json(
        &EvalFile {
            k: args.k,
            recall,
            n_implanted: truth.n_implanted,
            matches,
        },
        args.output,
    )?;
    Ok(())
}

/// `sweep`: run an experiment grid and write `sweep.csv`; per-point failures
/// are recorded, the command fails only when every point failed.
pub fn sweep(grid_path: &Path, output: &Path) -> Result<(), CliError> {
    let grid: ExperimentGrid = read_json(grid_path, "experiment grid")?;
    let rows = eval::run_experiment(&grid, |msg| eprintln!("sweep: {msg}"))?;
    eval::write_sweep_csv(&rows, output).map_err(|e| CliError::Input(e.to_string()))?;
    eprintln!("wrote {} rows -> {}", rows.len(), output.display());

    let all_failed = rows.iter().all(|r| r.n_failed >= grid.n_seeds);
    if all_failed {
        let reason = rows
            .iter()
            .find_map(|r| r.first_error.clone())
            .unwrap_or_else(|| "no grid point produced a result".into());
        return Err(CliError::AllFailed(reason));
    }
    Ok(())
}
