//! On-disk result formats: `results.json` and `eval.json`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rdmm_core::measures::ScoreBreakdown;
use rdmm_core::search::{Algorithm, MiningStats, PatternPair};
use rdmm_core::{Description, ModelParams};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SideOut {
    pub description: Description,
    pub support_count: usize,
    pub params: ModelParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairOut {
    pub rank: usize,
    pub left: SideOut,
    pub right: SideOut,
    pub score: ScoreBreakdown,
}

/// The ordered result list with enough context to rescore it: config echo,
/// dataset hashes and a version stamp.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultsFile {
    pub version: String,
    pub algorithm: Algorithm,
    pub left_path: String,
    pub right_path: String,
    pub left_sha256: String,
    pub right_sha256: String,
    pub config: RunConfig,
    pub stats: MiningStats,
    pub pairs: Vec<PairOut>,
}

impl ResultsFile {
    pub fn from_pairs(
        version: &str,
        algorithm: Algorithm,
        left_path: &Path,
        right_path: &Path,
        config: RunConfig,
        stats: MiningStats,
        pairs: &[PatternPair],
    ) -> std::io::Result<Self> {
        Ok(ResultsFile {
            version: version.to_string(),
            algorithm,
            left_path: left_path.display().to_string(),
            right_path: right_path.display().to_string(),
            left_sha256: sha256_hex(left_path)?,
            right_sha256: sha256_hex(right_path)?,
            config,
            stats,
            pairs: pairs
                .iter()
                .enumerate()
                .map(|(i, p)| PairOut {
                    rank: i + 1,
                    left: SideOut {
                        description: p.left.description.clone(),
                        support_count: p.left.support.count(),
                        params: p.left.params.clone(),
                    },
                    right: SideOut {
                        description: p.right.description.clone(),
                        support_count: p.right.support.count(),
                        params: p.right.params.clone(),
                    },
                    score: p.breakdown,
                })
                .collect(),
        })
    }
}

/// Per-rank ground-truth matches for one evaluated result list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalFile {
    pub k: usize,
    pub recall: f64,
    pub n_implanted: usize,
    /// matched model id per result rank, `null` when unmatched
    pub matches: Vec<Option<u32>>,
}

pub fn sha256_hex(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    Ok(out)
}

/// Serialize as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), crate::CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
