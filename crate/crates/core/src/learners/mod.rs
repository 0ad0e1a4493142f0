//! Parity learners for noiseless and noisy example oracles.
//!
//! Learners only see an oracle through [`QuantumSource`] or [`ClassicalSource`];
//! the planted concept stays with the caller.

mod lpn;

pub use lpn::{disagreements, learn_lpn_bkw, learn_lpn_bruteforce, BkwOutcome, MAX_BRUTEFORCE_N};

use crate::bounds::plan_retained_count;
use crate::error::{invalid, Result};
use crate::gf2::{BitString, Gf2System, Solution};
use crate::oracle::{ClassicalSource, NoiseRate, ParityConcept, QuantumSource};
use crate::scalar::{half, Real};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerReport {
    pub a_hat: BitString,
    pub queries_used: u64,
    /// Examples or outcomes that fed the final estimate.
    pub retained: u64,
    /// Whether the learner's own success condition held (full rank, enough
    /// retained outcomes, a nonzero report seen).
    pub succeeded_selfcheck: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryBudget {
    Limited(u64),
    Unlimited,
}

impl QueryBudget {
    pub fn limit(self) -> Option<u64> {
        match self {
            Self::Limited(k) => Some(k),
            Self::Unlimited => None,
        }
    }
}

/// Accuracy and confidence targets shared by the learners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    pub delta: f64,
    pub epsilon: f64,
    pub eta_assumed: NoiseRate,
    pub query_budget: QueryBudget,
}

impl LearnerConfig {
    pub fn new(
        delta: f64,
        epsilon: f64,
        eta_assumed: NoiseRate,
        query_budget: QueryBudget,
    ) -> Result<Self> {
        for (name, v) in [("delta", delta), ("epsilon", epsilon)] {
            if !(v > 0.0 && v < 0.5) {
                return Err(invalid(format!("{name} = {v} outside (0, 1/2)")));
            }
        }
        if query_budget == QueryBudget::Limited(0) {
            return Err(invalid("query budget must be positive"));
        }
        Ok(Self {
            delta,
            epsilon,
            eta_assumed,
            query_budget,
        })
    }
}

/// Rounds needed so that a round failing with probability below 3/4 fails
/// every time with probability below `delta`: `⌈log_{4/3}(1/δ)⌉ + 1`.
pub fn noiseless_round_cap(delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta = {delta} outside (0, 1)")));
    }
    Ok(((1.0 / delta).ln() / (4.0f64 / 3.0).ln()).ceil() as u64 + 1)
}

/// Gaussian elimination on rounds of `n` fresh noiseless examples, with the
/// round count set by [`noiseless_round_cap`].
pub fn learn_noiseless_classical<S>(oracle: &mut S, delta: f64) -> Result<LearnerReport>
where
    S: ClassicalSource + ?Sized,
{
    let rounds = noiseless_round_cap(delta)?;
    Ok(learn_noiseless_classical_rounds(oracle, rounds))
}

/// As [`learn_noiseless_classical`] with an explicit round cap. A round
/// succeeds when its `n` examples have rank `n`; if every round fails the
/// report carries `succeeded_selfcheck = false` and a zero estimate.
pub fn learn_noiseless_classical_rounds<S>(oracle: &mut S, max_rounds: u64) -> LearnerReport
where
    S: ClassicalSource + ?Sized,
{
    let n = oracle.n();
    let mut queries = 0;
    for _ in 0..max_rounds {
        let mut sys = Gf2System::new(n);
        for _ in 0..n {
            let ex = oracle.draw();
            sys.push(ex.x, ex.y).expect("oracle width is fixed");
        }
        queries += n as u64;
        if let Solution::Unique(a_hat) = sys.solve() {
            return LearnerReport {
                a_hat,
                queries_used: queries,
                retained: n as u64,
                succeeded_selfcheck: true,
            };
        }
    }
    LearnerReport {
        a_hat: BitString::zeros(n),
        queries_used: queries,
        retained: 0,
        succeeded_selfcheck: false,
    }
}

/// Draws `k` outcomes and reports the first nonzero query register seen, or
/// `0^n` if there was none. Only sound for noiseless or classification noise,
/// where the register is always `0^n` or `a`.
pub fn learn_quantum_nonzero_report<S>(oracle: &mut S, k: u64) -> LearnerReport
where
    S: QuantumSource + ?Sized,
{
    let n = oracle.n();
    let mut m = BitString::zeros(n);
    let mut report: Option<BitString> = None;
    let mut nonzero = 0;
    for _ in 0..k {
        oracle.draw_into(&mut m);
        if !m.is_zero() {
            nonzero += 1;
            if report.is_none() {
                report = Some(m.clone());
            }
        }
    }
    LearnerReport {
        succeeded_selfcheck: report.is_some(),
        a_hat: report.unwrap_or_else(|| BitString::zeros(n)),
        queries_used: k,
        retained: nonzero,
    }
}

/// Column counts for a bitwise majority vote.
#[derive(Debug, Clone)]
pub struct MajorityCounter {
    counts: Vec<u64>,
    total: u64,
}

impl MajorityCounter {
    pub fn new(n: usize) -> Self {
        Self {
            counts: vec![0; n],
            total: 0,
        }
    }

    pub fn add(&mut self, s: &BitString) {
        assert_eq!(s.len(), self.counts.len(), "length mismatch");
        for j in s.ones_iter() {
            self.counts[j] += 1;
        }
        self.total += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Bit `j` is 1 iff strictly more than half of the strings have it set.
    pub fn result(&self) -> BitString {
        BitString::from_bits(self.counts.iter().map(|&c| 2 * c > self.total))
    }
}

/// Bitwise majority; exact ties resolve to 0.
pub fn majority_vote(strings: &[BitString]) -> Result<BitString> {
    let first = strings
        .first()
        .ok_or_else(|| invalid("majority vote over no strings"))?;
    let mut counter = MajorityCounter::new(first.len());
    for s in strings {
        if s.len() != first.len() {
            return Err(invalid("majority vote over strings of different lengths"));
        }
        counter.add(s);
    }
    Ok(counter.result())
}

/// Majority-vote learner for depolarizing noise with the planner's `k′`.
pub fn learn_quantum_majority<S>(oracle: &mut S, eta: f64, delta: f64) -> Result<LearnerReport>
where
    S: QuantumSource + ?Sized,
{
    let plan = plan_retained_count(oracle.n(), eta, delta)?;
    Ok(learn_quantum_majority_with(oracle, plan.k_prime))
}

/// Queries until `k_prime` outcomes with `b = 1` are retained or `3·k_prime`
/// queries are spent, then majority-votes the retained registers. Running out
/// of queries keeps what was retained and clears `succeeded_selfcheck`.
pub fn learn_quantum_majority_with<S>(oracle: &mut S, k_prime: u64) -> LearnerReport
where
    S: QuantumSource + ?Sized,
{
    let n = oracle.n();
    let cap = k_prime.saturating_mul(3);
    let mut counter = MajorityCounter::new(n);
    let mut m = BitString::zeros(n);
    let mut queries = 0;
    while counter.total() < k_prime && queries < cap {
        queries += 1;
        if oracle.draw_into(&mut m) {
            counter.add(&m);
        }
    }
    LearnerReport {
        a_hat: counter.result(),
        queries_used: queries,
        retained: counter.total(),
        succeeded_selfcheck: counter.total() == k_prime,
    }
}

/// `Pr_x[h(x) = f(x)]` under uniform `x`: 1 for equal parities, 1/2 otherwise.
pub fn agreement<T: Real>(h: &ParityConcept, f: &ParityConcept) -> Result<T> {
    if h.n() != f.n() {
        return Err(invalid(format!("concepts on {} and {} bits", h.n(), f.n())));
    }
    Ok(if h == f { T::one() } else { half() })
}
