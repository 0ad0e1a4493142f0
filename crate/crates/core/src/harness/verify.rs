use std::fmt;
use std::str::FromStr;

use crate::bounds::{effective_error_rate, plan_retained_count, zeta, zeta_double_sum};
use crate::error::{invalid, Error, Result};
use crate::gf2::{independence_probability, BitString, Gf2System, Solution};
use crate::harness::stats::{binomial_sigma, tv_distance, tv_distance_tables};
use crate::learners::{
    disagreements, learn_lpn_bkw, learn_lpn_bruteforce, learn_noiseless_classical_rounds,
    learn_quantum_majority, BkwOutcome,
};
use crate::oracle::{
    classical_example, conditional_retained_distribution, exact_outcome_distribution,
    ClassicalExample, ClassicalOracle, ClassicalSource, NoiseModel, NoiseRate, OutcomeDistribution,
    ParityConcept, QuantumOracle, StringDistribution,
};
use crate::rng::RandomStream;
use crate::statevector::{
    depolarized_distribution_exact, prepare_example_state, trajectory_histogram,
    transformed_example_state,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Distributions,
    Bounds,
    Solvers,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::Distributions => "distributions",
            Self::Bounds => "bounds",
            Self::Solvers => "solvers",
            Self::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distributions" => Ok(Self::Distributions),
            "bounds" => Ok(Self::Bounds),
            "solvers" => Ok(Self::Solvers),
            "all" => Ok(Self::All),
            _ => Err(invalid(format!("unknown suite {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}/{}: {}", self.suite, self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

struct Recorder {
    suite: &'static str,
    checks: Vec<CheckResult>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, run: impl FnOnce() -> Result<(bool, String)>) {
        let (passed, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(CheckResult {
            suite: self.suite,
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

/// Runs the cross-checks of `suite`, seeded from `seed`. Failures are reported,
/// never returned as errors.
pub fn verify(suite: Suite, seed: u64) -> VerifyReport {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Distributions | Suite::All) {
        checks.extend(distributions(seed));
    }
    if matches!(suite, Suite::Bounds | Suite::All) {
        checks.extend(bounds(seed));
    }
    if matches!(suite, Suite::Solvers | Suite::All) {
        checks.extend(solvers(seed));
    }
    VerifyReport { checks }
}

fn distributions(seed: u64) -> Vec<CheckResult> {
    let mut rec = Recorder::new("distributions");
    let mut rng = RandomStream::derive(seed, 1);

    rec.check("hadamard_identity", || {
        let mut worst = 0.0f64;
        let mut ok = true;
        for n in 1..=6 {
            for _ in 0..20 {
                let concept = ParityConcept::random(n, &mut rng)?;
                let state = transformed_example_state::<f64>(&concept)?;
                let a1 = (concept.bits().to_index() as usize) << 1 | 1;
                for (i, amp) in state.amplitudes().iter().enumerate() {
                    if i == 0 || i == a1 {
                        worst = worst
                            .max((amp.re - std::f64::consts::FRAC_1_SQRT_2).abs() + amp.im.abs());
                    } else if amp.norm() > 1e-10 {
                        ok = false;
                    }
                }
            }
        }
        Ok((
            ok && worst <= 1e-10,
            format!("max |amp - 1/sqrt2| = {worst:.2e}"),
        ))
    });

    rec.check("depolarized_exact_vs_statevector", || {
        let mut worst = 0.0f64;
        for n in 1..=4 {
            for &eta in &[0.05, 0.15, 0.3] {
                let concept = ParityConcept::random(n, &mut rng)?;
                let structured =
                    exact_outcome_distribution::<f64>(&concept, &NoiseModel::depolarizing(eta)?)?;
                let simulated = depolarized_distribution_exact::<f64>(&concept, eta)?;
                for (p, q) in structured
                    .probabilities()
                    .iter()
                    .zip(simulated.probabilities())
                {
                    worst = worst.max((p - q).abs());
                }
            }
        }
        Ok((worst <= 1e-12, format!("max entry gap = {worst:.2e}")))
    });

    rec.check("trajectories_n3_eta0.15", || {
        let concept = ParityConcept::random(3, &mut rng)?;
        let exact = exact_outcome_distribution::<f64>(&concept, &NoiseModel::depolarizing(0.15)?)?;
        let state = transformed_example_state::<f64>(&concept)?;
        let hist = trajectory_histogram(&state, 0.15, 100_000, &mut rng)?;
        let tv = tv_distance(&exact, &hist)?;
        Ok((tv <= 0.02, format!("TV = {tv:.4}")))
    });

    rec.check("structured_sampler_vs_exact", || {
        let mut worst = 0.0f64;
        let concept = ParityConcept::random(4, &mut rng)?;
        for noise in [
            NoiseModel::Noiseless,
            NoiseModel::classification(0.2)?,
            NoiseModel::depolarizing(0.15)?,
        ] {
            let exact = exact_outcome_distribution::<f64>(&concept, &noise)?;
            let hist =
                OutcomeDistribution::<f64>::sample_histogram(&concept, &noise, 100_000, &mut rng)?;
            worst = worst.max(tv_distance(&exact, &hist)?);
        }
        Ok((worst <= 0.02, format!("max TV = {worst:.4}")))
    });

    rec.check("noiseless_statevector_measurement", || {
        let mut worst = 0.0f64;
        for n in 1..=5 {
            let concept = ParityConcept::random(n, &mut rng)?;
            let mut state = prepare_example_state::<f64>(&concept)?;
            state.apply_hadamard_all();
            let measured = state.measurement_distribution()?;
            let exact = exact_outcome_distribution::<f64>(&concept, &NoiseModel::Noiseless)?;
            worst = worst.max(tv_distance(&exact, &measured)?);
        }
        Ok((worst <= 1e-12, format!("max TV = {worst:.2e}")))
    });

    rec.check("retained_mixture", || {
        let mut worst = 0.0f64;
        for n in 1..=8 {
            for &eta in &[0.05, 0.2, 0.45] {
                let concept = ParityConcept::random(n, &mut rng)?;
                let retained =
                    conditional_retained_distribution::<f64>(&concept, NoiseRate::new(eta)?)?;
                let mix = StringDistribution::bit_flip(concept.bits(), eta)?.mix(
                    1.0 - eta,
                    &StringDistribution::bit_flip(&BitString::zeros(n), eta)?,
                )?;
                worst = worst
                    .max(tv_distance_tables(retained.probabilities(), mix.probabilities())? * 2.0);
            }
        }
        Ok((worst <= 1e-12, format!("max L1 gap = {worst:.2e}")))
    });

    rec.checks
}

/// Probability that an odd number of the `weight` support bits flip, summed
/// over all `2^n` flip patterns.
fn zeta_enumerated(n: usize, weight: usize, eta: f64) -> f64 {
    let support = (1u64 << weight) - 1;
    (0..1u64 << n)
        .filter(|e| (e & support).count_ones() % 2 == 1)
        .map(|e| {
            let d = e.count_ones() as i32;
            eta.powi(d) * (1.0 - eta).powi(n as i32 - d)
        })
        .sum()
}

fn bounds(seed: u64) -> Vec<CheckResult> {
    let mut rec = Recorder::new("bounds");
    let mut rng = RandomStream::derive(seed, 2);

    rec.check("zeta_three_routes", || {
        let mut worst = 0.0f64;
        for n in 1..=12 {
            for weight in 0..=n {
                for &eta in &[0.01, 0.1, 0.25, 0.4, 0.49] {
                    let closed = zeta::<f64>(n, weight, eta)?;
                    let double = zeta_double_sum::<f64>(n, weight, eta)?;
                    let brute = zeta_enumerated(n, weight, eta);
                    worst = worst
                        .max((closed - double).abs())
                        .max((closed - brute).abs());
                }
            }
        }
        Ok((worst <= 1e-12, format!("max gap = {worst:.2e}")))
    });

    rec.check("effective_rate_identity", || {
        let mut worst = 0.0f64;
        for n in [1, 5, 12, 40] {
            for weight in 0..=n.min(12) {
                for &eta in &[0.05, 0.2, 0.35] {
                    let z = zeta::<f64>(n, weight, eta)?;
                    let direct = eta * (1.0 - z) + z * (1.0 - eta);
                    let closed = 0.5 - 0.5 * (1.0 - 2.0 * eta).powi(weight as i32 + 1);
                    let got = effective_error_rate::<f64>(n, weight, eta)?;
                    worst = worst.max((got - direct).abs()).max((got - closed).abs());
                }
            }
        }
        Ok((worst <= 1e-12, format!("max gap = {worst:.2e}")))
    });

    rec.check("dephased_label_error_n10_w3", || {
        let (n, eta, samples) = (10, 0.1, 100_000u64);
        let concept = ParityConcept::random_with_weight(n, 3, &mut rng)?;
        let noise = NoiseModel::depolarizing(eta)?;
        let expected = effective_error_rate::<f64>(n, 3, eta)?;
        let mut wrong = 0u64;
        for _ in 0..samples {
            let ClassicalExample { x, y } = classical_example(&concept, &noise, &mut rng);
            wrong += (concept.eval(&x) != y) as u64;
        }
        let rate = wrong as f64 / samples as f64;
        let sigma = binomial_sigma(expected, samples);
        Ok((
            (rate - expected).abs() <= 3.0 * sigma,
            format!("rate {rate:.4} vs {expected:.4} (3σ = {:.4})", 3.0 * sigma),
        ))
    });

    rec.check("planner_log_growth", || {
        let ks: Vec<f64> = [64usize, 128, 256, 512, 1024, 2048, 4096]
            .iter()
            .map(|&n| plan_retained_count::<f64>(n, 0.2, 0.01).map(|p| p.k_prime as f64))
            .collect::<Result<_>>()?;
        let steps: Vec<f64> = ks.windows(2).map(|w| w[1] - w[0]).collect();
        let mean = steps.iter().sum::<f64>() / steps.len() as f64;
        let spread = steps
            .iter()
            .map(|s| (s / mean - 1.0).abs())
            .fold(0.0, f64::max);
        Ok((
            spread <= 0.1,
            format!("k' {:.0}..{:.0}, step spread {spread:.4}", ks[0], ks[6]),
        ))
    });

    rec.check("independence_probability_n8", || {
        let p = independence_probability::<f64>(8);
        Ok((
            (p - 0.28992).abs() <= 1e-4 && p > 0.25,
            format!("p = {p:.5}"),
        ))
    });

    rec.checks
}

fn solvers(seed: u64) -> Vec<CheckResult> {
    let mut rec = Recorder::new("solvers");
    let mut rng = RandomStream::derive(seed, 3);

    rec.check("gf2_solve_round_trip", || {
        let mut ok = 0;
        let mut full = 0;
        for _ in 0..200 {
            let a = BitString::random(24, &mut rng);
            let mut sys = Gf2System::new(24);
            for _ in 0..40 {
                let x = BitString::random(24, &mut rng);
                let y = x.parity_with(&a);
                sys.push(x, y)?;
            }
            if let Solution::Unique(s) = sys.solve() {
                full += 1;
                ok += (s == a) as u32;
            }
        }
        Ok((
            ok == full && full > 150,
            format!("{ok}/{full} full-rank systems solved"),
        ))
    });

    rec.check("map_matches_enumeration", || {
        let mut mismatches = 0;
        for _ in 0..20 {
            let concept = ParityConcept::random(8, &mut rng)?;
            let noise = NoiseModel::classification(0.2)?;
            let examples: Vec<_> = (0..40)
                .map(|_| classical_example(&concept, &noise, &mut rng))
                .collect();
            let map = learn_lpn_bruteforce(&examples, 0.2)?;
            let best = (0..1u64 << 8)
                .map(|i| disagreements(&BitString::from_index(8, i), &examples))
                .min()
                .unwrap_or(0);
            mismatches += (disagreements(&map, &examples) != best) as u32;
        }
        Ok((mismatches == 0, format!("{mismatches} of 20 not minimal")))
    });

    rec.check("map_recovers_n12", || {
        let mut hits = 0;
        for _ in 0..50 {
            let concept = ParityConcept::random(12, &mut rng)?;
            let noise = NoiseModel::classification(0.125)?;
            let examples: Vec<_> = (0..200)
                .map(|_| classical_example(&concept, &noise, &mut rng))
                .collect();
            hits += (&learn_lpn_bruteforce(&examples, 0.125)? == concept.bits()) as u32;
        }
        Ok((hits >= 46, format!("{hits}/50 recovered")))
    });

    rec.check("bkw_recovers_n12", || {
        let mut hits = 0;
        for _ in 0..10 {
            let concept = ParityConcept::random(12, &mut rng)?;
            let mut oracle = ClassicalOracle::new(
                concept.clone(),
                NoiseModel::classification(0.1)?,
                rng.split(),
            );
            if let BkwOutcome::Recovered(r) = learn_lpn_bkw(&mut oracle, 0.1, 2, 1 << 20)? {
                hits += (&r.a_hat == concept.bits()) as u32;
            }
        }
        Ok((hits >= 9, format!("{hits}/10 recovered")))
    });

    rec.check("noiseless_round_rate_n8", || {
        let rounds = 20_000u64;
        let mut hits = 0u64;
        for _ in 0..rounds {
            let concept = ParityConcept::random(8, &mut rng)?;
            let mut oracle = ClassicalOracle::new(concept, NoiseModel::Noiseless, rng.split());
            hits += learn_noiseless_classical_rounds(&mut oracle, 1).succeeded_selfcheck as u64;
            debug_assert_eq!(oracle.n(), 8);
        }
        let rate = hits as f64 / rounds as f64;
        let expected = independence_probability::<f64>(8);
        let sigma = binomial_sigma(expected, rounds);
        Ok((
            (rate - expected).abs() <= 4.0 * sigma,
            format!("rate {rate:.4} vs {expected:.4}"),
        ))
    });

    rec.check("majority_n32", || {
        let mut hits = 0;
        for _ in 0..20 {
            let concept = ParityConcept::random(32, &mut rng)?;
            let mut oracle =
                QuantumOracle::new(concept.clone(), NoiseModel::depolarizing(0.2)?, rng.split());
            hits +=
                (&learn_quantum_majority(&mut oracle, 0.2, 0.01)?.a_hat == concept.bits()) as u32;
        }
        Ok((hits >= 19, format!("{hits}/20 recovered")))
    });

    rec.checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerated_zeta_small_cases() {
        assert_eq!(zeta_enumerated(3, 0, 0.2), 0.0);
        assert!((zeta_enumerated(3, 1, 0.2) - 0.2).abs() < 1e-15);
        assert!((zeta_enumerated(4, 2, 0.1) - 0.18).abs() < 1e-15);
    }

    #[test]
    fn suite_names_parse() {
        for s in [
            Suite::Distributions,
            Suite::Bounds,
            Suite::Solvers,
            Suite::All,
        ] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn bounds_suite_passes() {
        let report = verify(Suite::Bounds, 7);
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), 5);
    }
}
