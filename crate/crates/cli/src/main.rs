use std::path::PathBuf;

use clap::{Parser, Subcommand};

use rdmm_cli::commands::{self, EvaluateArgs, MineArgs};
use rdmm_core::search::Algorithm;

#[derive(Parser)]
#[command(
    name = "rdmm",
    version,
    about = "Mine pairs of subgroup descriptions across two datasets that \
             induce similar exceptional models"
)]
struct Cli {
    /// Cap worker threads; `--threads 1` reproduces parallel results exactly
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark pair with ground truth
    Generate {
        /// generator config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// output directory for left.csv, right.csv, ground_truth.json,
        /// gen_config.json and run_config.json
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Mine the top-k description pairs across two datasets
    Mine {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// run config with schemas, model attributes and search settings
        #[arg(long)]
        config: PathBuf,
        /// `mine-and-pair` or `exhaustive`
        #[arg(long, default_value = "mine-and-pair")]
        algorithm: String,
        /// override the number of result pairs
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long, default_value = "results.json")]
        output: PathBuf,
    },
    /// Match mined results against ground truth and report recall@k
    Evaluate {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        ground_truth: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value = "eval.json")]
        output: PathBuf,
    },
    /// Run an experiment grid over measures and algorithms
    Sweep {
        /// experiment grid (JSON)
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value = "sweep.csv")]
        output: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            std::process::exit(2);
        }
    }

    let outcome = match &cli.command {
        Command::Generate { config, out_dir } => commands::generate(config, out_dir),
        Command::Mine {
            left,
            right,
            config,
            algorithm,
            top_k,
            output,
        } => match algorithm.parse::<Algorithm>() {
            Ok(algorithm) => commands::mine(MineArgs {
                left,
                right,
                config,
                algorithm,
                top_k: *top_k,
                output,
            }),
            Err(e) => {
                eprintln!("error: {e}");
                std::process::exit(2);
            }
        },
        Command::Evaluate {
            results,
            ground_truth,
            left,
            right,
            k,
            output,
        } => commands::evaluate(EvaluateArgs {
            results,
            ground_truth,
            left,
            right,
            k: *k,
            output,
        }),
        Command::Sweep { grid, output } => commands::sweep(grid, output),
    };

    if let Err(err) = outcome {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
