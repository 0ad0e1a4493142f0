//! Optional TOML config file. Keys mirror the long flag names with `_` in
//! place of `-`; a flag given on the command line wins over the file.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub noise: Option<String>,
    pub eta: Option<f64>,
    pub learner: Option<String>,
    pub delta: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub concept: Option<String>,
    pub concept_weight: Option<usize>,
    pub nonzero_queries: Option<u64>,
    pub rounds: Option<u64>,
    pub lpn_examples: Option<usize>,
    pub lpn_examples_max: Option<usize>,
    pub block_count: Option<usize>,
    pub sample_budget: Option<u64>,
    pub timing: Option<bool>,
    pub count: Option<u64>,
    pub kind: Option<String>,
    pub suite: Option<String>,
    pub n_list: Option<Vec<usize>>,
    pub lpn_n_list: Option<Vec<usize>>,
    pub lpn_eta: Option<f64>,
    pub lpn_trials: Option<u64>,
    pub bkw_budget: Option<u64>,
    pub out: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Flag, then file, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
