use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::bounds::effective_error_rate;
use crate::error::{invalid, Error, Result};
use crate::gf2::BitString;
use crate::harness::stats::wilson_interval;
use crate::learners::{
    learn_lpn_bkw, learn_lpn_bruteforce, learn_noiseless_classical,
    learn_noiseless_classical_rounds, learn_quantum_majority, learn_quantum_nonzero_report,
    BkwOutcome, LearnerReport, MAX_BRUTEFORCE_N,
};
use crate::oracle::{ClassicalOracle, ClassicalSource, NoiseModel, ParityConcept, QuantumOracle};
use crate::rng::RandomStream;

/// Column order of the per-trial CSV.
pub const TRIAL_CSV_HEADER: &str =
    "trial_index,n,noise_model,eta,learner,queries_used,retained,success,wall_time_ms,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LearnerKind {
    NoiselessClassical,
    QuantumNonzero,
    QuantumMajority,
    LpnBruteforce,
    LpnBkw,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 5] = [
        Self::NoiselessClassical,
        Self::QuantumNonzero,
        Self::QuantumMajority,
        Self::LpnBruteforce,
        Self::LpnBkw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NoiselessClassical => "noiseless_classical",
            Self::QuantumNonzero => "quantum_nonzero",
            Self::QuantumMajority => "quantum_majority",
            Self::LpnBruteforce => "lpn_bruteforce",
            Self::LpnBkw => "lpn_bkw",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid(format!("unknown learner {s:?}")))
    }
}

/// How each trial's hidden string is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConceptMode {
    Random,
    FixedWeight(usize),
    Fixed(BitString),
}

/// How many examples the brute-force solver gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpnExamples {
    Fixed(usize),
    /// Prefixes of one example stream of length `n, 2n, 4n, …` up to `max`;
    /// the trial reports the first prefix length whose estimate is correct.
    /// This measures sample complexity and uses the planted concept to stop.
    Doubling {
        max: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Queries per run for `quantum_nonzero`.
    pub nonzero_queries: u64,
    /// Round cap for `noiseless_classical`; `None` derives it from `delta`.
    pub rounds: Option<u64>,
    pub lpn_examples: LpnExamples,
    /// Block count for `lpn_bkw`; `None` picks the count with the smallest
    /// starting pool.
    pub block_count: Option<usize>,
    pub sample_budget: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            nonzero_queries: 20,
            rounds: None,
            lpn_examples: LpnExamples::Fixed(200),
            block_count: None,
            sample_budget: 1 << 22,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub noise: NoiseModel,
    pub learner: LearnerKind,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub concept: ConceptMode,
    pub params: SolverParams,
    /// Measure per-trial wall time. Off by default so output is a pure function
    /// of the configuration; when off the column is written as 0.
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    pub fn new(n: usize, noise: NoiseModel, learner: LearnerKind) -> Self {
        Self {
            n,
            noise,
            learner,
            delta: 0.01,
            trials: 100,
            seed: 0,
            concept: ConceptMode::Random,
            params: SolverParams::default(),
            record_wall_time: false,
        }
    }

    /// Checks ranges and the learner/noise pairing.
    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.n == 0 {
            return cfg("n must be positive".into());
        }
        if self.trials == 0 {
            return cfg("trials must be at least 1".into());
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return cfg(format!("delta = {} outside (0, 1/2)", self.delta));
        }
        match &self.concept {
            ConceptMode::Random => {}
            ConceptMode::FixedWeight(w) if *w > self.n => {
                return cfg(format!("concept weight {w} exceeds n = {}", self.n));
            }
            ConceptMode::FixedWeight(_) => {}
            ConceptMode::Fixed(a) if a.len() != self.n => {
                return cfg(format!("concept {a} does not have n = {} bits", self.n));
            }
            ConceptMode::Fixed(_) => {}
        }
        match (self.learner, &self.noise) {
            (LearnerKind::NoiselessClassical, NoiseModel::Noiseless) => {}
            (LearnerKind::NoiselessClassical, noise) => {
                return cfg(format!(
                    "noiseless_classical needs a noiseless oracle, got {}",
                    noise.name()
                ));
            }
            (LearnerKind::QuantumNonzero, NoiseModel::Depolarizing(_)) => {
                return cfg("quantum_nonzero is only sound without depolarizing noise".into());
            }
            (LearnerKind::QuantumNonzero, _) => {
                if self.params.nonzero_queries == 0 {
                    return cfg("quantum_nonzero needs at least one query".into());
                }
            }
            (LearnerKind::QuantumMajority, NoiseModel::Depolarizing(eta)) if eta.get() > 0.0 => {}
            (LearnerKind::QuantumMajority, _) => {
                return cfg(
                    "quantum_majority needs depolarizing noise with eta in (0, 1/2)".into(),
                );
            }
            (LearnerKind::LpnBruteforce, _) => {
                if self.n > MAX_BRUTEFORCE_N {
                    return cfg(format!("lpn_bruteforce supports n <= {MAX_BRUTEFORCE_N}"));
                }
                match self.params.lpn_examples {
                    LpnExamples::Fixed(0) => return cfg("lpn_bruteforce needs examples".into()),
                    LpnExamples::Doubling { max } if max < self.n => {
                        return cfg("example ladder maximum below n".into());
                    }
                    _ => {}
                }
            }
            (LearnerKind::LpnBkw, _) => {
                let blocks = self.bkw_block_count();
                if blocks == 0 || blocks > self.n || self.n.div_ceil(blocks) > 24 {
                    return cfg(format!("block count {blocks} unusable for n = {}", self.n));
                }
                if self.params.sample_budget == 0 {
                    return cfg("sample budget must be positive".into());
                }
            }
        }
        Ok(())
    }

    pub(crate) fn bkw_block_count(&self) -> usize {
        self.params
            .block_count
            .unwrap_or_else(|| auto_block_count(self.n, self.noise.eta()))
    }
}

/// Block count minimizing `votes(levels)·2^{width}`, the dominant BKW pool size.
pub(crate) fn auto_block_count(n: usize, eta_prime: f64) -> usize {
    (n.div_ceil(24).max(1)..=n)
        .min_by(|&a, &b| {
            let cost = |blocks: usize| {
                let width = n.div_ceil(blocks) as f64;
                let bias = (1.0 - 2.0 * eta_prime).powi(1 << (blocks - 1).min(30));
                (20.0 * n as f64).ln() / (bias * bias) * width.exp2() + blocks as f64 * width.exp2()
            };
            cost(a).partial_cmp(&cost(b)).unwrap()
        })
        .unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub n: usize,
    pub noise_model: &'static str,
    pub eta: f64,
    pub learner: LearnerKind,
    pub queries_used: u64,
    pub retained: u64,
    pub success: bool,
    pub wall_time_ms: u64,
    pub seed: u64,
}

impl TrialRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.trial_index,
            self.n,
            self.noise_model,
            self.eta,
            self.learner,
            self.queries_used,
            self.retained,
            self.success,
            self.wall_time_ms,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// 95% Wilson interval on the success rate.
    pub success_interval: (f64, f64),
    pub mean_queries: f64,
    pub mean_retained: f64,
}

impl ExperimentSummary {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let trials = records.len() as u64;
        let successes = records.iter().filter(|r| r.success).count() as u64;
        let mean = |f: fn(&TrialRecord) -> u64| {
            records.iter().map(|r| f(r) as f64).sum::<f64>() / trials.max(1) as f64
        };
        Self {
            trials,
            successes,
            success_rate: successes as f64 / trials.max(1) as f64,
            success_interval: wilson_interval(successes, trials, 1.96),
            mean_queries: mean(|r| r.queries_used),
            mean_retained: mean(|r| r.retained),
        }
    }
}

impl fmt::Display for ExperimentSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trials={} successes={} success_rate={:.6} ci95=[{:.6}, {:.6}] mean_queries={:.2} mean_retained={:.2}",
            self.trials,
            self.successes,
            self.success_rate,
            self.success_interval.0,
            self.success_interval.1,
            self.mean_queries,
            self.mean_retained
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub summary: ExperimentSummary,
}

/// Runs every trial on its own stream `RandomStream::derive(seed, trial_index)`.
/// Trials run in parallel; records come back ordered by trial index.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let records = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i).map(|t| t.record))
        .collect::<Result<Vec<_>>>()?;
    let summary = ExperimentSummary::from_records(&records);
    Ok(ExperimentResult { records, summary })
}

fn plant(config: &ExperimentConfig, rng: &mut RandomStream) -> Result<ParityConcept> {
    match &config.concept {
        ConceptMode::Random => ParityConcept::random(config.n, rng),
        ConceptMode::FixedWeight(w) => ParityConcept::random_with_weight(config.n, *w, rng),
        ConceptMode::Fixed(a) => ParityConcept::new(a.clone()),
    }
}

/// Label error rate the classical solvers are told: the LPN rate of the
/// dephased oracle for this instance.
fn lpn_rate(concept: &ParityConcept, noise: &NoiseModel) -> Result<f64> {
    match noise {
        NoiseModel::Noiseless => Ok(0.0),
        NoiseModel::Classification(eta) => Ok(eta.get()),
        NoiseModel::Depolarizing(eta) => {
            effective_error_rate(concept.n(), concept.weight(), eta.get())
        }
    }
}

/// Everything one trial produced, including the planted concept.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub concept: ParityConcept,
    pub report: LearnerReport,
    pub record: TrialRecord,
}

/// Runs trial `trial_index` of `config` alone. The record equals row
/// `trial_index` of [`run_experiment`].
pub fn run_single(config: &ExperimentConfig, trial_index: u64) -> Result<TrialOutcome> {
    config.validate()?;
    run_trial(config, trial_index)
}

fn run_trial(config: &ExperimentConfig, trial_index: u64) -> Result<TrialOutcome> {
    let mut stream = RandomStream::derive(config.seed, trial_index);
    let mut concept_rng = stream.split();
    let oracle_rng = stream.split();
    let concept = plant(config, &mut concept_rng)?;
    let started = Instant::now();
    let (report, success) = run_learner(config, &concept, oracle_rng)?;
    let success = success.unwrap_or_else(|| &report.a_hat == concept.bits());
    let wall_time_ms = if config.record_wall_time {
        started.elapsed().as_millis() as u64
    } else {
        0
    };
    let record = TrialRecord {
        trial_index,
        n: config.n,
        noise_model: config.noise.name(),
        eta: config.noise.eta(),
        learner: config.learner,
        queries_used: report.queries_used,
        retained: report.retained,
        success,
        wall_time_ms,
        seed: config.seed,
    };
    Ok(TrialOutcome {
        concept,
        report,
        record,
    })
}

/// Runs the configured learner. The second value overrides the success flag
/// for runs that cannot produce an estimate.
fn run_learner(
    config: &ExperimentConfig,
    concept: &ParityConcept,
    rng: RandomStream,
) -> Result<(LearnerReport, Option<bool>)> {
    let noise = config.noise;
    let n = config.n;
    let quantum = || QuantumOracle::new(concept.clone(), noise, rng.clone());
    let mut classical = ClassicalOracle::new(concept.clone(), noise, rng.clone());
    let report = match config.learner {
        LearnerKind::NoiselessClassical => match config.params.rounds {
            Some(rounds) => learn_noiseless_classical_rounds(&mut classical, rounds),
            None => learn_noiseless_classical(&mut classical, config.delta)?,
        },
        LearnerKind::QuantumNonzero => {
            learn_quantum_nonzero_report(&mut quantum(), config.params.nonzero_queries)
        }
        LearnerKind::QuantumMajority => {
            learn_quantum_majority(&mut quantum(), noise.eta(), config.delta)?
        }
        LearnerKind::LpnBruteforce => {
            let eta_prime = lpn_rate(concept, &noise)?;
            return bruteforce_trial(
                &mut classical,
                concept,
                eta_prime,
                config.params.lpn_examples,
            );
        }
        LearnerKind::LpnBkw => {
            let eta_prime = lpn_rate(concept, &noise)?;
            let blocks = config.bkw_block_count();
            match learn_lpn_bkw(
                &mut classical,
                eta_prime,
                blocks,
                config.params.sample_budget,
            )? {
                BkwOutcome::Recovered(report) => report,
                BkwOutcome::Failure { samples_used } => {
                    let report = LearnerReport {
                        a_hat: BitString::zeros(n),
                        queries_used: samples_used,
                        retained: 0,
                        succeeded_selfcheck: false,
                    };
                    return Ok((report, Some(false)));
                }
            }
        }
    };
    Ok((report, None))
}

fn bruteforce_trial(
    oracle: &mut ClassicalOracle,
    concept: &ParityConcept,
    eta_prime: f64,
    examples: LpnExamples,
) -> Result<(LearnerReport, Option<bool>)> {
    let n = oracle.n();
    let report = |a_hat: BitString, m: usize| LearnerReport {
        a_hat,
        queries_used: m as u64,
        retained: m as u64,
        succeeded_selfcheck: true,
    };
    match examples {
        LpnExamples::Fixed(m) => {
            let drawn: Vec<_> = (0..m).map(|_| oracle.draw()).collect();
            Ok((report(learn_lpn_bruteforce(&drawn, eta_prime)?, m), None))
        }
        LpnExamples::Doubling { max } => {
            let mut drawn = Vec::new();
            let mut m = n;
            loop {
                while drawn.len() < m {
                    drawn.push(oracle.draw());
                }
                let a_hat = learn_lpn_bruteforce(&drawn, eta_prime)?;
                if &a_hat == concept.bits() || m >= max {
                    return Ok((report(a_hat, m), None));
                }
                m = (2 * m).min(max);
            }
        }
    }
}

/// Writes the header and one row per record.
pub fn write_trials_csv<W: Write>(records: &[TrialRecord], out: &mut W) -> io::Result<()> {
    writeln!(out, "{TRIAL_CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}
