use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::harness::experiment::{
    run_experiment, ExperimentConfig, LearnerKind, LpnExamples, TrialRecord,
};
use crate::oracle::NoiseModel;

pub const SEPARATION_CSV_HEADER: &str =
    "n,learner,noise_model,eta,trials,mean_queries,min_queries,max_queries,mean_work,success_rate";

/// Query-count comparison between the quantum majority learner and classical
/// baselines.
///
/// `n_list` drives the quantum and noiseless-classical rows. The LPN solvers
/// cost `2^n`-ish time, so they run on their own smaller `lpn_n_list` under
/// classification noise at `lpn_eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationConfig {
    pub n_list: Vec<usize>,
    pub eta: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub lpn_n_list: Vec<usize>,
    pub lpn_eta: f64,
    pub lpn_trials: u64,
    pub bkw_budget: u64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            n_list: vec![64, 128, 256, 512],
            eta: 0.2,
            delta: 0.01,
            trials: 20,
            seed: 0,
            lpn_n_list: vec![8, 12, 16, 20],
            lpn_eta: 0.125,
            lpn_trials: 10,
            bkw_budget: 1 << 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationRow {
    pub n: usize,
    pub learner: LearnerKind,
    pub noise_model: &'static str,
    pub eta: f64,
    pub trials: u64,
    pub mean_queries: f64,
    pub min_queries: u64,
    pub max_queries: u64,
    /// Mean of [`work_estimate`] over trials.
    pub mean_work: f64,
    pub success_rate: f64,
}

impl SeparationRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3},{},{},{:.0},{:.6}",
            self.n,
            self.learner,
            self.noise_model,
            self.eta,
            self.trials,
            self.mean_queries,
            self.min_queries,
            self.max_queries,
            self.mean_work,
            self.success_rate
        )
    }
}

/// Deterministic operation count for one trial, in units of 64-bit word
/// operations (or table entries for the Walsh–Hadamard transform).
///
/// * quantum and noiseless classical: one word pass per query, plus
///   `n²·⌈n/64⌉` per elimination round for the classical learner;
/// * brute force: each rung of the doubling ladder fills the table and runs an
///   `n·2^n` transform;
/// * BKW: one word pass per sample and block.
pub fn work_estimate(config: &ExperimentConfig, record: &TrialRecord) -> f64 {
    let n = config.n as f64;
    let words = config.n.div_ceil(64) as f64;
    let q = record.queries_used as f64;
    match config.learner {
        LearnerKind::QuantumMajority | LearnerKind::QuantumNonzero => q * words,
        LearnerKind::NoiselessClassical => q * words + (q / n).ceil() * n * n * words,
        LearnerKind::LpnBruteforce => {
            let rungs = match config.params.lpn_examples {
                LpnExamples::Fixed(_) => 1.0,
                LpnExamples::Doubling { .. } => (q / n).log2().ceil() + 1.0,
            };
            q * words + rungs * n * n.exp2()
        }
        LearnerKind::LpnBkw => q * words * config.bkw_block_count() as f64,
    }
}

fn row(config: &ExperimentConfig) -> Result<SeparationRow> {
    let result = run_experiment(config)?;
    let mean_work = result
        .records
        .iter()
        .map(|r| work_estimate(config, r))
        .sum::<f64>()
        / result.records.len() as f64;
    let queries = result.records.iter().map(|r| r.queries_used);
    Ok(SeparationRow {
        n: config.n,
        learner: config.learner,
        noise_model: config.noise.name(),
        eta: config.noise.eta(),
        trials: result.summary.trials,
        mean_queries: result.summary.mean_queries,
        min_queries: queries.clone().min().unwrap_or(0),
        max_queries: queries.max().unwrap_or(0),
        mean_work,
        success_rate: result.summary.success_rate,
    })
}

/// One row per `(n, learner)`. The brute-force row reports the first prefix
/// length, on a doubling ladder from `n`, at which the MAP estimate is correct.
pub fn separation_report(config: &SeparationConfig) -> Result<Vec<SeparationRow>> {
    if config.n_list.is_empty() && config.lpn_n_list.is_empty() {
        return Err(Error::Config("no problem sizes given".into()));
    }
    let depolarizing =
        NoiseModel::depolarizing(config.eta).map_err(|e| Error::Config(e.to_string()))?;
    let classification =
        NoiseModel::classification(config.lpn_eta).map_err(|e| Error::Config(e.to_string()))?;
    let mut rows = Vec::new();
    for &n in &config.n_list {
        for (learner, noise) in [
            (LearnerKind::QuantumMajority, depolarizing),
            (LearnerKind::NoiselessClassical, NoiseModel::Noiseless),
        ] {
            let mut c = ExperimentConfig::new(n, noise, learner);
            c.delta = config.delta;
            c.trials = config.trials;
            c.seed = config.seed;
            rows.push(row(&c)?);
        }
    }
    for &n in &config.lpn_n_list {
        let mut c = ExperimentConfig::new(n, classification, LearnerKind::LpnBruteforce);
        c.delta = config.delta;
        c.trials = config.lpn_trials;
        c.seed = config.seed;
        c.params.lpn_examples = LpnExamples::Doubling { max: n << 12 };
        rows.push(row(&c)?);
        c.learner = LearnerKind::LpnBkw;
        c.params.sample_budget = config.bkw_budget;
        rows.push(row(&c)?);
    }
    Ok(rows)
}

pub fn write_separation_csv<W: Write>(rows: &[SeparationRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "{SEPARATION_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}
