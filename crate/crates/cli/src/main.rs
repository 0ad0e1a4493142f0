//! `noisy-parity`: sample noisy parity oracles, run learners, batch seeded
//! experiments, run the verification suites and print the separation table.
//!
//! Exit status is 0 on success, 1 when a verification check fails and 2 for
//! configuration or usage errors.

mod settings;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use noisy_parity::harness::{
    run_experiment, run_single, separation_report, verify, write_separation_csv, write_trials_csv,
    ConceptMode, ExperimentConfig, LearnerKind, LpnExamples, SeparationConfig, Suite,
};
use noisy_parity::oracle::{classical_example, quantum_outcome};
use noisy_parity::{BitString, NoiseKind, NoiseModel, ParityConcept, RandomStream};

use settings::{pick, FileConfig};

#[derive(Parser)]
#[command(
    name = "noisy-parity",
    version,
    about = "Learning parities from noisy quantum and classical examples"
)]
struct Cli {
    /// TOML file with default values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump oracle outputs as CSV.
    Sample(SampleArgs),
    /// Run one learner once and report the estimate.
    Learn(RunArgs),
    /// Run seeded trials and write one CSV row per trial.
    Experiment(ExperimentArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Compare query counts of the quantum and classical learners.
    Separation(SeparationArgs),
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    n: Option<usize>,
    /// noiseless, classification or depolarizing.
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed hidden string, e.g. 10110.
    #[arg(long, conflicts_with = "concept_weight")]
    concept: Option<String>,
    /// Plant a uniformly random string of this Hamming weight.
    #[arg(long)]
    concept_weight: Option<usize>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// quantum or classical.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    count: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// noiseless_classical, quantum_nonzero, quantum_majority, lpn_bruteforce or lpn_bkw.
    #[arg(long)]
    learner: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// Query count for quantum_nonzero.
    #[arg(long)]
    nonzero_queries: Option<u64>,
    /// Round cap for noiseless_classical.
    #[arg(long)]
    rounds: Option<u64>,
    /// Example count for lpn_bruteforce.
    #[arg(long, conflicts_with = "lpn_examples_max")]
    lpn_examples: Option<usize>,
    /// Give lpn_bruteforce n, 2n, 4n, ... examples up to this many and report
    /// the first count that recovers the hidden string.
    #[arg(long)]
    lpn_examples_max: Option<usize>,
    #[arg(long)]
    block_count: Option<usize>,
    #[arg(long)]
    sample_budget: Option<u64>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    trials: Option<u64>,
    /// Measure per-trial wall time; without it the column is 0 and output is
    /// byte-for-byte reproducible.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// distributions, bounds, solvers or all.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SeparationArgs {
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    lpn_n_list: Option<Vec<usize>>,
    #[arg(long)]
    lpn_eta: Option<f64>,
    #[arg(long)]
    lpn_trials: Option<u64>,
    #[arg(long)]
    bkw_budget: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Returned when a verification check fails.
#[derive(Debug)]
struct VerificationFailed(usize);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<VerificationFailed>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Sample(args) => sample(args, &file),
        Command::Learn(args) => learn(args, &file),
        Command::Experiment(args) => experiment(args, &file),
        Command::Verify(args) => verify_cmd(args, &file),
        Command::Separation(args) => separation(args, &file),
    }
}

fn output(flag: Option<PathBuf>, file: &FileConfig) -> Result<Box<dyn Write>> {
    match flag.or_else(|| file.out.clone().map(PathBuf::from)) {
        Some(path) => {
            let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn noise_model(args: &ProblemArgs, file: &FileConfig) -> Result<NoiseModel> {
    let name = pick(
        args.noise.clone(),
        file.noise.clone(),
        "noiseless".to_string(),
    );
    let kind: NoiseKind = name.parse()?;
    let eta = pick(args.eta, file.eta, 0.0);
    if kind == NoiseKind::Noiseless && eta != 0.0 {
        bail!("eta = {eta} given for a noiseless oracle");
    }
    Ok(NoiseModel::from_name(kind.name(), eta)?)
}

fn concept_mode(args: &ProblemArgs, file: &FileConfig) -> Result<ConceptMode> {
    // A concept flag of either kind hides both concept keys of the file.
    let (text, weight) = if args.concept.is_some() || args.concept_weight.is_some() {
        (args.concept.clone(), args.concept_weight)
    } else {
        (file.concept.clone(), file.concept_weight)
    };
    Ok(match (text, weight) {
        (Some(_), Some(_)) => bail!("give either concept or concept_weight, not both"),
        (Some(text), None) => ConceptMode::Fixed(text.parse::<BitString>()?),
        (None, Some(w)) => ConceptMode::FixedWeight(w),
        (None, None) => ConceptMode::Random,
    })
}

fn required_n(args: &ProblemArgs, file: &FileConfig, concept: &ConceptMode) -> Result<usize> {
    match (args.n.or(file.n), concept) {
        (Some(n), _) => Ok(n),
        (None, ConceptMode::Fixed(bits)) => Ok(bits.len()),
        (None, _) => Err(anyhow!("--n is required")),
    }
}

fn experiment_config(args: &RunArgs, file: &FileConfig) -> Result<ExperimentConfig> {
    let concept = concept_mode(&args.problem, file)?;
    let n = required_n(&args.problem, file, &concept)?;
    let noise = noise_model(&args.problem, file)?;
    let learner: LearnerKind = args
        .learner
        .clone()
        .or_else(|| file.learner.clone())
        .ok_or_else(|| anyhow!("--learner is required"))?
        .parse()?;
    let mut config = ExperimentConfig::new(n, noise, learner);
    config.concept = concept;
    config.delta = pick(args.delta, file.delta, config.delta);
    config.seed = pick(args.problem.seed, file.seed, config.seed);
    let p = &mut config.params;
    p.nonzero_queries = pick(
        args.nonzero_queries,
        file.nonzero_queries,
        p.nonzero_queries,
    );
    p.rounds = args.rounds.or(file.rounds);
    p.block_count = args.block_count.or(file.block_count);
    p.sample_budget = pick(args.sample_budget, file.sample_budget, p.sample_budget);
    if let Some(max) = args.lpn_examples_max {
        p.lpn_examples = LpnExamples::Doubling { max };
    } else if let Some(m) = args.lpn_examples {
        p.lpn_examples = LpnExamples::Fixed(m);
    } else if let Some(max) = file.lpn_examples_max {
        p.lpn_examples = LpnExamples::Doubling { max };
    } else if let Some(m) = file.lpn_examples {
        p.lpn_examples = LpnExamples::Fixed(m);
    }
    Ok(config)
}

fn sample(args: SampleArgs, file: &FileConfig) -> Result<()> {
    let mode = concept_mode(&args.problem, file)?;
    let n = required_n(&args.problem, file, &mode)?;
    let noise = noise_model(&args.problem, file)?;
    let seed = pick(args.problem.seed, file.seed, 0);
    let count = pick(args.count, file.count, 10);
    let kind = pick(args.kind, file.kind.clone(), "quantum".to_string());
    let mut rng = RandomStream::new(seed);
    let mut concept_rng = rng.split();
    let concept = match mode {
        ConceptMode::Random => ParityConcept::random(n, &mut concept_rng)?,
        ConceptMode::FixedWeight(w) => ParityConcept::random_with_weight(n, w, &mut concept_rng)?,
        ConceptMode::Fixed(bits) if bits.len() == n => ParityConcept::new(bits)?,
        ConceptMode::Fixed(bits) => bail!("concept {bits} does not have n = {n} bits"),
    };
    let mut out = output(args.out, file)?;
    writeln!(out, "m_or_x,b_or_y")?;
    match kind.as_str() {
        "quantum" => {
            for _ in 0..count {
                let o = quantum_outcome(&concept, &noise, &mut rng);
                writeln!(out, "{},{}", o.m, o.b as u8)?;
            }
        }
        "classical" => {
            for _ in 0..count {
                let e = classical_example(&concept, &noise, &mut rng);
                writeln!(out, "{},{}", e.x, e.y as u8)?;
            }
        }
        other => bail!("unknown sample kind {other:?}; use quantum or classical"),
    }
    out.flush()?;
    Ok(())
}

fn learn(args: RunArgs, file: &FileConfig) -> Result<()> {
    let config = experiment_config(&args, file)?;
    let t = run_single(&config, 0)?;
    let r = &t.record;
    println!("concept={}", t.concept);
    println!("a_hat={}", t.report.a_hat);
    println!("success={}", r.success);
    println!("queries_used={}", r.queries_used);
    println!("retained={}", r.retained);
    println!("selfcheck={}", t.report.succeeded_selfcheck);
    Ok(())
}

fn experiment(args: ExperimentArgs, file: &FileConfig) -> Result<()> {
    let mut config = experiment_config(&args.run, file)?;
    config.trials = pick(args.trials, file.trials, config.trials);
    config.record_wall_time = args.timing || file.timing.unwrap_or(false);
    let result = run_experiment(&config)?;
    let mut out = output(args.out, file)?;
    write_trials_csv(&result.records, &mut out)?;
    out.flush()?;
    eprintln!("{}", result.summary);
    Ok(())
}

fn verify_cmd(args: VerifyArgs, file: &FileConfig) -> Result<()> {
    let suite: Suite = pick(args.suite, file.suite.clone(), "all".to_string()).parse()?;
    let report = verify(suite, pick(args.seed, file.seed, 0));
    println!("{report}");
    match report.failures().count() {
        0 => Ok(()),
        failed => Err(VerificationFailed(failed).into()),
    }
}

fn separation(args: SeparationArgs, file: &FileConfig) -> Result<()> {
    let d = SeparationConfig::default();
    let config = SeparationConfig {
        n_list: pick(args.n_list, file.n_list.clone(), d.n_list),
        eta: pick(args.eta, file.eta, d.eta),
        delta: pick(args.delta, file.delta, d.delta),
        trials: pick(args.trials, file.trials, d.trials),
        seed: pick(args.seed, file.seed, d.seed),
        lpn_n_list: pick(args.lpn_n_list, file.lpn_n_list.clone(), d.lpn_n_list),
        lpn_eta: pick(args.lpn_eta, file.lpn_eta, d.lpn_eta),
        lpn_trials: pick(args.lpn_trials, file.lpn_trials, d.lpn_trials),
        bkw_budget: pick(args.bkw_budget, file.bkw_budget, d.bkw_budget),
    };
    let rows = separation_report(&config)?;
    let mut out = output(args.out, file)?;
    write_separation_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}
