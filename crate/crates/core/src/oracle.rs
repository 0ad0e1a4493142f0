//! Structured samplers for noisy parity example oracles.
//!
//! Nothing here simulates a state vector. A quantum query is sampled straight
//! from its post-Hadamard measurement law in `O(n)` time, and a classical
//! query is the computational-basis (dephased) version of the same oracle.
//! The dense simulator in [`crate::statevector`] checks these laws.
//!
//! Outcome tables are indexed by `(m.to_index() << 1) | b`, so the result bit
//! is the least significant position, matching the basis ordering of
//! [`crate::statevector::PureState`].

use std::fmt;
use std::str::FromStr;

use crate::error::{check_capacity, invalid, Error, Result};
use crate::gf2::BitString;
use crate::rng::RandomStream;
use crate::scalar::{half, lit, Real};

/// Largest `n` for which dense `2^{n+1}` outcome tables are built.
pub const MAX_TABLE_N: usize = 20;

/// The hidden string `a` of the parity `f_a(x) = ⟨a, x⟩ mod 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParityConcept {
    a: BitString,
}

impl ParityConcept {
    pub fn new(a: BitString) -> Result<Self> {
        if a.is_empty() {
            return Err(invalid("concept must have at least one bit"));
        }
        Ok(Self { a })
    }

    pub fn random(n: usize, rng: &mut RandomStream) -> Result<Self> {
        Self::new(BitString::random(n, rng))
    }

    /// Uniform among the concepts of Hamming weight `weight`.
    pub fn random_with_weight(n: usize, weight: usize, rng: &mut RandomStream) -> Result<Self> {
        if weight > n {
            return Err(invalid(format!("weight {weight} exceeds n = {n}")));
        }
        // Partial Fisher-Yates over coordinates.
        let mut idx: Vec<usize> = (0..n).collect();
        let mut a = BitString::zeros(n);
        for i in 0..weight {
            let j = i + rng.below((n - i) as u64) as usize;
            idx.swap(i, j);
            a.set(idx[i], true);
        }
        Self::new(a)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.a.len()
    }

    #[inline]
    pub fn bits(&self) -> &BitString {
        &self.a
    }

    pub fn weight(&self) -> usize {
        self.a.weight()
    }

    #[inline]
    pub fn eval(&self, x: &BitString) -> bool {
        self.a.parity_with(x)
    }
}

impl fmt::Display for ParityConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.a.fmt(f)
    }
}

/// A noise rate `η` with `0 ≤ η < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NoiseRate(f64);

impl NoiseRate {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&eta) {
            return Err(invalid(format!("noise rate {eta} outside [0, 1/2)")));
        }
        Ok(Self(eta))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Noiseless,
    /// The result qubit is flipped with probability `η`.
    Classification(NoiseRate),
    /// Every output qubit passes through `D_η(ρ) = (1−2η)ρ + 2η·I/2`.
    Depolarizing(NoiseRate),
}

impl NoiseModel {
    pub fn classification(eta: f64) -> Result<Self> {
        NoiseRate::new(eta).map(Self::Classification)
    }

    pub fn depolarizing(eta: f64) -> Result<Self> {
        NoiseRate::new(eta).map(Self::Depolarizing)
    }

    /// Parses `noiseless`, `classification` or `depolarizing` together with a rate.
    pub fn from_name(name: &str, eta: f64) -> Result<Self> {
        match name.parse::<NoiseKind>()? {
            NoiseKind::Noiseless => Ok(Self::Noiseless),
            NoiseKind::Classification => Self::classification(eta),
            NoiseKind::Depolarizing => Self::depolarizing(eta),
        }
    }

    pub fn eta(&self) -> f64 {
        match self {
            Self::Noiseless => 0.0,
            Self::Classification(r) | Self::Depolarizing(r) => r.get(),
        }
    }

    pub fn kind(&self) -> NoiseKind {
        match self {
            Self::Noiseless => NoiseKind::Noiseless,
            Self::Classification(_) => NoiseKind::Classification,
            Self::Depolarizing(_) => NoiseKind::Depolarizing,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Noiseless,
    Classification,
    Depolarizing,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Noiseless => "noiseless",
            Self::Classification => "classification",
            Self::Depolarizing => "depolarizing",
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noiseless" | "none" => Ok(Self::Noiseless),
            "classification" => Ok(Self::Classification),
            "depolarizing" => Ok(Self::Depolarizing),
            other => Err(invalid(format!("unknown noise model {other:?}"))),
        }
    }
}

/// One post-Hadamard measurement: query register `m` and result bit `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumOutcome {
    pub m: BitString,
    pub b: bool,
}

/// One dephased example `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalExample {
    pub x: BitString,
    pub y: bool,
}

/// Samples one classical example from the dephased oracle.
pub fn classical_example(
    concept: &ParityConcept,
    noise: &NoiseModel,
    rng: &mut RandomStream,
) -> ClassicalExample {
    let n = concept.n();
    let mut x = BitString::random(n, rng);
    let mut y = concept.eval(&x);
    match noise {
        NoiseModel::Noiseless => {}
        NoiseModel::Classification(eta) => y ^= rng.bernoulli(eta.get()),
        NoiseModel::Depolarizing(eta) => {
            // The label was computed on the clean x; the register flips afterwards.
            let flips = BitString::bernoulli(n, eta.get(), rng);
            x.xor_assign(&flips);
            y ^= rng.bernoulli(eta.get());
        }
    }
    ClassicalExample { x, y }
}

/// Samples one post-Hadamard measurement of the (noisy) quantum example state.
pub fn quantum_outcome(
    concept: &ParityConcept,
    noise: &NoiseModel,
    rng: &mut RandomStream,
) -> QuantumOutcome {
    let mut m = BitString::zeros(concept.n());
    let b = quantum_outcome_into(concept, noise, rng, &mut m);
    QuantumOutcome { m, b }
}

/// Like [`quantum_outcome`], writing the query register into `m` and returning `b`.
///
/// Without noise the state is `(|0^n,0⟩ + |a,1⟩)/√2`, so a uniform branch bit
/// `β` gives `(βa, β)`. Classification noise flips the result bit. Under
/// depolarizing noise each qubit sees X or Y (flipping its measured bit) with
/// total probability `η`; Z only changes phases, which the computational basis
/// cannot see, so the outcome is `(βa ⊕ e, β ⊕ e_{n+1})` with `e` i.i.d.
/// Bernoulli(`η`).
pub fn quantum_outcome_into(
    concept: &ParityConcept,
    noise: &NoiseModel,
    rng: &mut RandomStream,
    m: &mut BitString,
) -> bool {
    let branch = rng.bit();
    match noise {
        NoiseModel::Noiseless | NoiseModel::Classification(_) => {
            if branch {
                m.copy_from(concept.bits());
            } else {
                m.clear();
            }
            match noise {
                NoiseModel::Classification(eta) => branch ^ rng.bernoulli(eta.get()),
                _ => branch,
            }
        }
        NoiseModel::Depolarizing(eta) => {
            m.fill_bernoulli(eta.get(), rng);
            if branch {
                m.xor_assign(concept.bits());
            }
            branch ^ rng.bernoulli(eta.get())
        }
    }
}

/// A probability table over joint outcomes `(m, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution<T> {
    n: usize,
    probabilities: Vec<T>,
}

impl<T: Real> OutcomeDistribution<T> {
    /// Wraps a table of length `2^{n+1}` indexed by `(m << 1) | b`.
    pub fn from_table(n: usize, probabilities: Vec<T>) -> Result<Self> {
        check_capacity("outcome table", n, MAX_TABLE_N)?;
        if probabilities.len() != 1 << (n + 1) {
            return Err(invalid(format!(
                "table of length {} for n = {n}",
                probabilities.len()
            )));
        }
        Ok(Self { n, probabilities })
    }

    /// Empirical distribution from outcome counts.
    pub fn from_counts(n: usize, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(invalid("no samples"));
        }
        let total = T::from_u64(total).unwrap();
        Self::from_table(
            n,
            counts
                .iter()
                .map(|&c| T::from_u64(c).unwrap() / total)
                .collect(),
        )
    }

    /// Histogram of `samples` outcomes drawn with [`quantum_outcome`].
    pub fn sample_histogram(
        concept: &ParityConcept,
        noise: &NoiseModel,
        samples: u64,
        rng: &mut RandomStream,
    ) -> Result<Self> {
        let n = concept.n();
        check_capacity("outcome table", n, MAX_TABLE_N)?;
        let mut counts = vec![0u64; 1 << (n + 1)];
        let mut m = BitString::zeros(n);
        for _ in 0..samples {
            let b = quantum_outcome_into(concept, noise, rng, &mut m);
            counts[outcome_index(&m, b)] += 1;
        }
        Self::from_counts(n, &counts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn get(&self, m: &BitString, b: bool) -> T {
        self.probabilities[outcome_index(m, b)]
    }

    pub fn total(&self) -> T {
        self.probabilities.iter().copied().sum()
    }

    /// `Pr[b = 1]`.
    pub fn result_bit_marginal(&self) -> T {
        self.probabilities.iter().skip(1).step_by(2).copied().sum()
    }

    /// The law of `m` given `b`.
    pub fn condition_on_result(&self, b: bool) -> Result<StringDistribution<T>> {
        let slice: Vec<T> = self
            .probabilities
            .iter()
            .skip(b as usize)
            .step_by(2)
            .copied()
            .collect();
        let mass: T = slice.iter().copied().sum();
        if mass <= T::zero() {
            return Err(invalid("conditioning on an event of probability zero"));
        }
        StringDistribution::from_table(self.n, slice.into_iter().map(|p| p / mass).collect())
    }
}

#[inline]
pub(crate) fn outcome_index(m: &BitString, b: bool) -> usize {
    ((m.to_index() as usize) << 1) | b as usize
}

/// A probability table over `m ∈ {0,1}^n`, indexed by `m.to_index()`.
#[derive(Debug, Clone, PartialEq)]
pub struct StringDistribution<T> {
    n: usize,
    probabilities: Vec<T>,
}

impl<T: Real> StringDistribution<T> {
    pub fn from_table(n: usize, probabilities: Vec<T>) -> Result<Self> {
        check_capacity("string table", n, MAX_TABLE_N)?;
        if probabilities.len() != 1 << n {
            return Err(invalid(format!(
                "table of length {} for n = {n}",
                probabilities.len()
            )));
        }
        Ok(Self { n, probabilities })
    }

    /// `D_q^η`: the string `q` after independent bit flips at rate `eta`.
    pub fn bit_flip(q: &BitString, eta: T) -> Result<Self> {
        let n = q.len();
        check_capacity("string table", n, MAX_TABLE_N)?;
        let qi = q.to_index();
        let table = (0..1u64 << n)
            .map(|m| flip_probability(n, (m ^ qi).count_ones() as usize, eta))
            .collect();
        Self::from_table(n, table)
    }

    /// `w·self + (1−w)·other`.
    pub fn mix(&self, weight: T, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(invalid("mixing distributions of different widths"));
        }
        let table = self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(&p, &q)| weight * p + (T::one() - weight) * q)
            .collect();
        Self::from_table(self.n, table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn get(&self, m: &BitString) -> T {
        self.probabilities[m.to_index() as usize]
    }

    pub fn total(&self) -> T {
        self.probabilities.iter().copied().sum()
    }
}

/// `η^d (1−η)^{n−d}`.
#[inline]
fn flip_probability<T: Real>(n: usize, distance: usize, eta: T) -> T {
    eta.powi(distance as i32) * (T::one() - eta).powi((n - distance) as i32)
}

/// Exact joint law of `(m, b)` for the given concept and noise model.
pub fn exact_outcome_distribution<T: Real>(
    concept: &ParityConcept,
    noise: &NoiseModel,
) -> Result<OutcomeDistribution<T>> {
    let n = concept.n();
    check_capacity("exact outcome distribution", n, MAX_TABLE_N)?;
    let a = concept.bits().to_index();
    let zero_branch = 0usize;
    let a_branch = ((a as usize) << 1) | 1;
    let mut table = vec![T::zero(); 1 << (n + 1)];
    match noise {
        NoiseModel::Noiseless => {
            table[zero_branch] = table[zero_branch] + half();
            table[a_branch] = table[a_branch] + half();
        }
        NoiseModel::Classification(rate) => {
            let eta: T = lit(rate.get());
            let keep = (T::one() - eta) * half();
            let flip = eta * half();
            table[zero_branch] = table[zero_branch] + keep;
            table[a_branch] = table[a_branch] + keep;
            table[zero_branch | 1] = table[zero_branch | 1] + flip;
            table[a_branch ^ 1] = table[a_branch ^ 1] + flip;
        }
        NoiseModel::Depolarizing(rate) => {
            let eta: T = lit(rate.get());
            let result = |bit: bool| if bit { eta } else { T::one() - eta };
            for m in 0..1u64 << n {
                let from_zero = flip_probability(n, m.count_ones() as usize, eta);
                let from_a = flip_probability(n, (m ^ a).count_ones() as usize, eta);
                for b in [false, true] {
                    let p = half::<T>() * from_zero * result(b) + half::<T>() * from_a * result(!b);
                    table[((m as usize) << 1) | b as usize] = p;
                }
            }
        }
    }
    OutcomeDistribution::from_table(n, table)
}

/// Law of the retained query register (`b = 1`) under depolarizing noise at
/// rate `eta`, from the joint law. Equals `(1−η)·D_a^η + η·D_{0^n}^η`.
pub fn conditional_retained_distribution<T: Real>(
    concept: &ParityConcept,
    eta: NoiseRate,
) -> Result<StringDistribution<T>> {
    exact_outcome_distribution::<T>(concept, &NoiseModel::Depolarizing(eta))?
        .condition_on_result(true)
}

/// `Pr[b = 1]` for a single query.
pub fn marginal_result_bit<T: Real>(noise: &NoiseModel) -> T {
    let eta: T = lit(noise.eta());
    let one = T::one();
    match noise {
        NoiseModel::Noiseless => half(),
        // Branch 0 reports 1 only when flipped, branch 1 unless flipped.
        NoiseModel::Classification(_) | NoiseModel::Depolarizing(_) => {
            half::<T>() * eta + half::<T>() * (one - eta)
        }
    }
}

/// A source of quantum outcomes. Learners see only `n` and the samples.
pub trait QuantumSource {
    fn n(&self) -> usize;

    /// Draws one outcome into `m`, returning the result bit.
    fn draw_into(&mut self, m: &mut BitString) -> bool;

    fn draw(&mut self) -> QuantumOutcome {
        let mut m = BitString::zeros(self.n());
        let b = self.draw_into(&mut m);
        QuantumOutcome { m, b }
    }
}

/// A source of dephased classical examples.
pub trait ClassicalSource {
    fn n(&self) -> usize;

    fn draw(&mut self) -> ClassicalExample;
}

/// Simulated quantum example oracle for a planted concept.
#[derive(Debug, Clone)]
pub struct QuantumOracle {
    concept: ParityConcept,
    noise: NoiseModel,
    rng: RandomStream,
    queries: u64,
}

impl QuantumOracle {
    pub fn new(concept: ParityConcept, noise: NoiseModel, rng: RandomStream) -> Self {
        Self {
            concept,
            noise,
            rng,
            queries: 0,
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl QuantumSource for QuantumOracle {
    fn n(&self) -> usize {
        self.concept.n()
    }

    fn draw_into(&mut self, m: &mut BitString) -> bool {
        self.queries += 1;
        quantum_outcome_into(&self.concept, &self.noise, &mut self.rng, m)
    }
}

/// Simulated dephased example oracle for a planted concept.
#[derive(Debug, Clone)]
pub struct ClassicalOracle {
    concept: ParityConcept,
    noise: NoiseModel,
    rng: RandomStream,
    queries: u64,
}

impl ClassicalOracle {
    pub fn new(concept: ParityConcept, noise: NoiseModel, rng: RandomStream) -> Self {
        Self {
            concept,
            noise,
            rng,
            queries: 0,
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl ClassicalSource for ClassicalOracle {
    fn n(&self) -> usize {
        self.concept.n()
    }

    fn draw(&mut self) -> ClassicalExample {
        self.queries += 1;
        classical_example(&self.concept, &self.noise, &mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn concept(s: &str) -> ParityConcept {
        ParityConcept::new(s.parse().unwrap()).unwrap()
    }

    fn tv(p: &[f64], q: &[f64]) -> f64 {
        0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    #[test]
    fn noise_rate_range() {
        assert!(NoiseRate::new(0.0).is_ok());
        assert!(NoiseRate::new(0.499).is_ok());
        assert!(NoiseRate::new(0.5).is_err());
        assert!(NoiseRate::new(-0.1).is_err());
        assert!(NoiseRate::new(f64::NAN).is_err());
        assert_eq!(
            NoiseModel::from_name("depolarizing", 0.2).unwrap().eta(),
            0.2
        );
        assert!(NoiseModel::from_name("amplitude", 0.2).is_err());
    }

    #[test]
    fn fixed_weight_concepts() {
        let mut rng = RandomStream::new(4);
        for w in 0..=10 {
            assert_eq!(
                ParityConcept::random_with_weight(10, w, &mut rng)
                    .unwrap()
                    .weight(),
                w
            );
        }
        assert!(ParityConcept::random_with_weight(3, 4, &mut rng).is_err());
    }

    #[test]
    fn noiseless_zero_concept_labels_zero() {
        let c = ParityConcept::new(BitString::zeros(9)).unwrap();
        let mut rng = RandomStream::new(1);
        for _ in 0..1000 {
            assert!(!classical_example(&c, &NoiseModel::Noiseless, &mut rng).y);
        }
    }

    #[test]
    fn classification_label_error_rate() {
        let c = concept("1");
        let noise = NoiseModel::classification(0.25).unwrap();
        let mut rng = RandomStream::new(8);
        let trials = 100_000;
        let errors = (0..trials)
            .filter(|_| {
                let ex = classical_example(&c, &noise, &mut rng);
                ex.y != c.eval(&ex.x)
            })
            .count();
        let rate = errors as f64 / trials as f64;
        let sigma = (0.25 * 0.75 / trials as f64).sqrt();
        assert!((rate - 0.25).abs() < 3.0 * sigma, "rate {rate}");
    }

    #[test]
    fn noiseless_quantum_outcomes_two_points() {
        let c = concept("1011");
        let mut rng = RandomStream::new(3);
        let mut ones = 0;
        let trials = 100_000;
        for _ in 0..trials {
            let out = quantum_outcome(&c, &NoiseModel::Noiseless, &mut rng);
            if out.b {
                assert_eq!(&out.m, c.bits());
                ones += 1;
            } else {
                assert!(out.m.is_zero());
            }
        }
        let sigma = (0.25 / trials as f64).sqrt();
        assert!((ones as f64 / trials as f64 - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn classification_register_shows_a_half_the_time() {
        let c = concept("110");
        for &eta in &[0.1, 0.3, 0.45] {
            let noise = NoiseModel::classification(eta).unwrap();
            let mut rng = RandomStream::new(12);
            let trials = 100_000;
            let hits = (0..trials)
                .filter(|_| &quantum_outcome(&c, &noise, &mut rng).m == c.bits())
                .count();
            let sigma = (0.25 / trials as f64).sqrt();
            assert!((hits as f64 / trials as f64 - 0.5).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn exact_distribution_examples() {
        let d = exact_outcome_distribution::<f64>(&concept("11"), &NoiseModel::Noiseless).unwrap();
        assert_eq!(d.get(&"00".parse().unwrap(), false), 0.5);
        assert_eq!(d.get(&"11".parse().unwrap(), true), 0.5);
        assert_eq!(d.probabilities().iter().filter(|&&p| p > 0.0).count(), 2);
        assert!(exact_outcome_distribution::<f64>(
            &ParityConcept::new(BitString::zeros(21)).unwrap(),
            &NoiseModel::Noiseless
        )
        .is_err());
    }

    #[test]
    fn exact_distribution_zero_concept_is_product() {
        let eta = 0.3;
        let c = ParityConcept::new(BitString::zeros(3)).unwrap();
        let d =
            exact_outcome_distribution::<f64>(&c, &NoiseModel::depolarizing(eta).unwrap()).unwrap();
        for m in 0..8u64 {
            let w = m.count_ones() as i32;
            let product = eta.powi(w) * (1.0 - eta).powi(3 - w);
            let ms = BitString::from_index(3, m);
            assert!((d.get(&ms, false) - product / 2.0).abs() < 1e-15);
            assert!((d.get(&ms, true) - product / 2.0).abs() < 1e-15);
        }
        assert!((d.result_bit_marginal() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_distributions_normalized() {
        let mut rng = RandomStream::new(77);
        for n in 1..=10 {
            let c = ParityConcept::random(n, &mut rng).unwrap();
            for &eta in &[0.0, 0.05, 0.15, 0.3, 0.49] {
                for noise in [
                    NoiseModel::Noiseless,
                    NoiseModel::classification(eta).unwrap(),
                    NoiseModel::depolarizing(eta).unwrap(),
                ] {
                    let d = exact_outcome_distribution::<f64>(&c, &noise).unwrap();
                    assert!((d.total() - 1.0).abs() < 1e-12);
                    assert!(d.probabilities().iter().all(|&p| p >= 0.0));
                    assert!((d.result_bit_marginal() - 0.5).abs() < 1e-12);
                    assert!((marginal_result_bit::<f64>(&noise) - 0.5).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn sampler_histograms_converge() {
        let mut rng = RandomStream::new(99);
        for n in 1..=4 {
            let c = ParityConcept::random(n, &mut rng).unwrap();
            for noise in [
                NoiseModel::Noiseless,
                NoiseModel::classification(0.2).unwrap(),
                NoiseModel::depolarizing(0.15).unwrap(),
            ] {
                let exact = exact_outcome_distribution::<f64>(&c, &noise).unwrap();
                let emp =
                    OutcomeDistribution::<f64>::sample_histogram(&c, &noise, 100_000, &mut rng)
                        .unwrap();
                let d = tv(exact.probabilities(), emp.probabilities());
                assert!(d <= 0.02, "n={n} {noise:?} tv={d}");
            }
        }
    }

    #[test]
    fn depolarizing_n3_histogram() {
        let c = concept("101");
        let noise = NoiseModel::depolarizing(0.15).unwrap();
        let mut rng = RandomStream::new(5);
        let exact = exact_outcome_distribution::<f64>(&c, &noise).unwrap();
        let emp =
            OutcomeDistribution::<f64>::sample_histogram(&c, &noise, 100_000, &mut rng).unwrap();
        assert!(tv(exact.probabilities(), emp.probabilities()) <= 0.02);
    }

    #[test]
    fn depolarizing_label_error_matches_effective_rate() {
        let mut rng = RandomStream::new(31);
        let c = ParityConcept::random_with_weight(10, 3, &mut rng).unwrap();
        let noise = NoiseModel::depolarizing(0.1).unwrap();
        let trials = 100_000;
        let errors = (0..trials)
            .filter(|_| {
                let ex = classical_example(&c, &noise, &mut rng);
                ex.y != c.eval(&ex.x)
            })
            .count();
        let expected = crate::bounds::effective_error_rate(10, 3, 0.1).unwrap();
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((errors as f64 / trials as f64 - expected).abs() < 3.0 * sigma);
    }

    #[test]
    fn depolarized_register_is_uniform_classically() {
        // x' = x xor e is uniform: every one of the 8 registers shows up ~1/8.
        let c = concept("011");
        let noise = NoiseModel::depolarizing(0.2).unwrap();
        let mut rng = RandomStream::new(6);
        let mut counts = [0u32; 8];
        let trials = 80_000;
        for _ in 0..trials {
            counts[classical_example(&c, &noise, &mut rng).x.to_index() as usize] += 1;
        }
        let sigma = (trials as f64 * (1.0 / 8.0) * (7.0 / 8.0)).sqrt();
        for &k in &counts {
            assert!((k as f64 - trials as f64 / 8.0).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn retained_distribution_is_mixture() {
        let mut rng = RandomStream::new(21);
        for n in 1..=10 {
            for _ in 0..3 {
                let c = ParityConcept::random(n, &mut rng).unwrap();
                for &eta in &[0.05, 0.1, 0.3, 0.45] {
                    let rate = NoiseRate::new(eta).unwrap();
                    let retained = conditional_retained_distribution::<f64>(&c, rate).unwrap();
                    let da = StringDistribution::bit_flip(c.bits(), eta).unwrap();
                    let d0 = StringDistribution::bit_flip(&BitString::zeros(n), eta).unwrap();
                    let mixture = da.mix(1.0 - eta, &d0).unwrap();
                    for (p, q) in retained.probabilities().iter().zip(mixture.probabilities()) {
                        assert!((p - q).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn retained_distribution_limits() {
        let c = concept("110");
        let point =
            conditional_retained_distribution::<f64>(&c, NoiseRate::new(0.0).unwrap()).unwrap();
        assert_eq!(point.get(c.bits()), 1.0);
        let zero = ParityConcept::new(BitString::zeros(3)).unwrap();
        let r =
            conditional_retained_distribution::<f64>(&zero, NoiseRate::new(0.2).unwrap()).unwrap();
        let d0 = StringDistribution::bit_flip(&BitString::zeros(3), 0.2).unwrap();
        for (p, q) in r.probabilities().iter().zip(d0.probabilities()) {
            assert!((p - q).abs() < 1e-15);
        }
    }

    #[test]
    fn oracles_count_queries() {
        let c = concept("10");
        let mut q = QuantumOracle::new(c.clone(), NoiseModel::Noiseless, RandomStream::new(1));
        let mut k = ClassicalOracle::new(c, NoiseModel::Noiseless, RandomStream::new(1));
        for _ in 0..5 {
            q.draw();
            k.draw();
        }
        assert_eq!(q.queries(), 5);
        assert_eq!(k.queries(), 5);
    }
}
