//! Dense pure-state simulator for `n + 1` qubits, used to check the structured
//! samplers in [`crate::oracle`] against first principles.
//!
//! Qubit `q` for `q < n` is query bit `x_{q+1}`; qubit `n` is the result qubit.
//! In a basis index, qubit `q` sits at bit position `n − q`, so the result
//! qubit is the least significant bit and `index = (x << 1) | b` with `x_1`
//! most significant. Depolarizing noise is applied by Pauli trajectories.

use num_complex::Complex;

use crate::error::{check_capacity, invalid, Result};
use crate::gf2::BitString;
use crate::oracle::{OutcomeDistribution, ParityConcept, MAX_TABLE_N};
use crate::rng::RandomStream;
use crate::scalar::{half, lit, Real};

/// Largest `n` for exact enumeration of all `4^{n+1}` Pauli patterns.
pub const MAX_ENUMERATION_N: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(invalid("a state needs at least one qubit"));
        }
        check_capacity("dense state", n_qubits, MAX_TABLE_N + 1)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid(format!("{len} amplitudes is not a qubit register")));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    #[inline]
    fn stride(&self, qubit: usize) -> usize {
        assert!(qubit < self.n_qubits, "qubit {qubit} out of range");
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Calls `f(i0, i1)` for every basis pair differing only in `qubit`.
    fn for_pairs(&mut self, qubit: usize, mut f: impl FnMut(&mut [Complex<T>], usize, usize)) {
        let stride = self.stride(qubit);
        let len = self.amplitudes.len();
        let mut base = 0;
        while base < len {
            for i0 in base..base + stride {
                f(&mut self.amplitudes, i0, i0 + stride);
            }
            base += 2 * stride;
        }
    }

    pub fn apply_hadamard(&mut self, qubit: usize) {
        let s = T::FRAC_1_SQRT_2();
        self.for_pairs(qubit, |amp, i0, i1| {
            let (a0, a1) = (amp[i0], amp[i1]);
            amp[i0] = (a0 + a1).scale(s);
            amp[i1] = (a0 - a1).scale(s);
        });
    }

    pub fn apply_hadamard_all(&mut self) {
        for q in 0..self.n_qubits {
            self.apply_hadamard(q);
        }
    }

    pub fn apply_single_pauli(&mut self, qubit: usize, pauli: Pauli) {
        let i = Complex::new(T::zero(), T::one());
        match pauli {
            Pauli::I => {}
            Pauli::X => self.for_pairs(qubit, |amp, i0, i1| amp.swap(i0, i1)),
            // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩.
            Pauli::Y => self.for_pairs(qubit, |amp, i0, i1| {
                let (a0, a1) = (amp[i0], amp[i1]);
                amp[i0] = -i * a1;
                amp[i1] = i * a0;
            }),
            Pauli::Z => self.for_pairs(qubit, |amp, _, i1| amp[i1] = -amp[i1]),
        }
    }

    /// Applies the tensor product of single-qubit Paulis in `pattern`.
    pub fn apply_pauli(&mut self, pattern: &PauliPattern) -> Result<()> {
        if pattern.len() != self.n_qubits {
            return Err(invalid(format!(
                "Pauli pattern on {} qubits applied to {} qubits",
                pattern.len(),
                self.n_qubits
            )));
        }
        for (q, &p) in pattern.labels().iter().enumerate() {
            self.apply_single_pauli(q, p);
        }
        Ok(())
    }

    /// `Q_f: |x, b⟩ ↦ |x, b ⊕ f(x)⟩`.
    pub fn apply_membership_oracle(&mut self, concept: &ParityConcept) -> Result<()> {
        let n = concept.n();
        if self.n_qubits != n + 1 {
            return Err(invalid(format!(
                "oracle for n = {n} needs {} qubits, state has {}",
                n + 1,
                self.n_qubits
            )));
        }
        let a = concept.bits().to_index();
        for x in 0..1usize << n {
            if (a & x as u64).count_ones() & 1 == 1 {
                self.amplitudes.swap(x << 1, (x << 1) | 1);
            }
        }
        Ok(())
    }

    /// Born-rule probabilities split as `(m, b)`.
    pub fn measurement_distribution(&self) -> Result<OutcomeDistribution<T>> {
        OutcomeDistribution::from_table(
            self.n_qubits - 1,
            self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        )
    }

    /// Samples a basis index by inverse CDF from a single uniform draw.
    pub fn sample_measurement(&self, rng: &mut RandomStream) -> usize {
        let u: T = lit(rng.uniform());
        let mut acc = T::zero();
        for (idx, a) in self.amplitudes.iter().enumerate() {
            acc = acc + a.norm_sqr();
            if u < acc {
                return idx;
            }
        }
        // Rounding left the total a hair under u: take the last nonzero entry.
        self.amplitudes
            .iter()
            .rposition(|a| a.norm_sqr() > T::zero())
            .unwrap_or(0)
    }
}

/// The uniform quantum example state `2^{−n/2} Σ_x |x, f(x)⟩`, built by
/// Hadamards on the query register of `|0^n, 0⟩` followed by the membership oracle.
pub fn prepare_example_state<T: Real>(concept: &ParityConcept) -> Result<PureState<T>> {
    let n = concept.n();
    check_capacity("example state", n, MAX_TABLE_N)?;
    let mut state = PureState::zero(n + 1)?;
    for q in 0..n {
        state.apply_hadamard(q);
    }
    state.apply_membership_oracle(concept)?;
    Ok(state)
}

/// The example state with every qubit Hadamard transformed, `(|0^n,0⟩ + |a,1⟩)/√2`
/// in the noiseless case.
pub fn transformed_example_state<T: Real>(concept: &ParityConcept) -> Result<PureState<T>> {
    let mut state = prepare_example_state(concept)?;
    state.apply_hadamard_all();
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Weight of this label in the Pauli mixture realizing `D_η`:
    /// `1 − 3η/2` for I and `η/2` for each of X, Y, Z.
    pub fn depolarizing_weight<T: Real>(self, eta: T) -> T {
        match self {
            Pauli::I => T::one() - lit::<T>(1.5) * eta,
            _ => half::<T>() * eta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliPattern {
    labels: Vec<Pauli>,
}

impl PauliPattern {
    pub fn new(labels: Vec<Pauli>) -> Self {
        Self { labels }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(vec![Pauli::I; n_qubits])
    }

    /// Pattern number `index` in base 4, qubit 0 least significant.
    pub fn from_index(n_qubits: usize, mut index: u64) -> Self {
        let labels = (0..n_qubits)
            .map(|_| {
                let p = Pauli::ALL[(index & 3) as usize];
                index >>= 2;
                p
            })
            .collect();
        Self::new(labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.labels
    }

    /// Probability of this pattern under `D_η^{⊗ len}`.
    pub fn probability<T: Real>(&self, eta: T) -> T {
        self.labels
            .iter()
            .fold(T::one(), |acc, p| acc * p.depolarizing_weight(eta))
    }
}

/// Draws a pattern with each qubit independently I w.p. `1 − 3η/2` and each of
/// X, Y, Z w.p. `η/2`.
pub fn sample_pauli_pattern(
    eta: f64,
    n_qubits: usize,
    rng: &mut RandomStream,
) -> Result<PauliPattern> {
    if !(0.0..=2.0 / 3.0).contains(&eta) {
        return Err(invalid(format!("depolarizing rate {eta} outside [0, 2/3]")));
    }
    let labels = (0..n_qubits)
        .map(|_| {
            let u = rng.uniform();
            if u < 0.5 * eta {
                Pauli::X
            } else if u < eta {
                Pauli::Y
            } else if u < 1.5 * eta {
                Pauli::Z
            } else {
                Pauli::I
            }
        })
        .collect();
    Ok(PauliPattern::new(labels))
}

/// Exact outcome law of the depolarized example oracle: the measurement
/// distribution of the transformed example state under every Pauli pattern,
/// averaged with the pattern probabilities.
pub fn depolarized_distribution_exact<T: Real>(
    concept: &ParityConcept,
    eta: T,
) -> Result<OutcomeDistribution<T>> {
    let n = concept.n();
    check_capacity("Pauli enumeration", n, MAX_ENUMERATION_N)?;
    if !(eta >= T::zero() && eta <= lit(2.0 / 3.0)) {
        return Err(invalid(format!("depolarizing rate {eta} outside [0, 2/3]")));
    }
    let ideal = transformed_example_state::<T>(concept)?;
    let n_qubits = n + 1;
    let mut table = vec![T::zero(); 1 << n_qubits];
    let mut state = ideal.clone();
    for index in 0..1u64 << (2 * n_qubits) {
        let pattern = PauliPattern::from_index(n_qubits, index);
        let weight = pattern.probability(eta);
        if weight == T::zero() {
            continue;
        }
        state.amplitudes.copy_from_slice(&ideal.amplitudes);
        state.apply_pauli(&pattern)?;
        for (t, a) in table.iter_mut().zip(&state.amplitudes) {
            *t = *t + weight * a.norm_sqr();
        }
    }
    OutcomeDistribution::from_table(n, table)
}

/// Empirical outcome law from `trajectories` runs of: sample a Pauli pattern,
/// apply it to `state`, measure once.
pub fn trajectory_histogram<T: Real>(
    state: &PureState<T>,
    eta: f64,
    trajectories: u64,
    rng: &mut RandomStream,
) -> Result<OutcomeDistribution<T>> {
    let mut counts = vec![0u64; state.amplitudes.len()];
    let mut work = state.clone();
    for _ in 0..trajectories {
        let pattern = sample_pauli_pattern(eta, state.n_qubits, rng)?;
        work.amplitudes.copy_from_slice(&state.amplitudes);
        work.apply_pauli(&pattern)?;
        counts[work.sample_measurement(rng)] += 1;
    }
    OutcomeDistribution::from_counts(state.n_qubits - 1, &counts)
}

/// Outcome of a Bernstein–Vazirani run.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinVazirani<T> {
    /// Most likely query-register string.
    pub estimate: BitString,
    /// Probability of measuring `estimate` in the query register.
    pub estimate_probability: T,
    /// Probability that the result qubit reads 1.
    pub result_one_probability: T,
}

/// Prepares `|0^n⟩|−⟩`, applies `Q_f`, Hadamards the query register and
/// reads off the hidden string.
pub fn bernstein_vazirani<T: Real>(concept: &ParityConcept) -> Result<BernsteinVazirani<T>> {
    let n = concept.n();
    check_capacity("Bernstein-Vazirani", n, MAX_TABLE_N)?;
    let mut state = PureState::<T>::zero(n + 1)?;
    state.apply_single_pauli(n, Pauli::X);
    state.apply_hadamard_all();
    state.apply_membership_oracle(concept)?;
    for q in 0..n {
        state.apply_hadamard(q);
    }
    let dist = state.measurement_distribution()?;
    let p = dist.probabilities();
    let register = |m: usize| p[m << 1] + p[(m << 1) | 1];
    let best = (0..1usize << n)
        .max_by(|&i, &j| register(i).partial_cmp(&register(j)).unwrap())
        .expect("nonempty register");
    Ok(BernsteinVazirani {
        estimate: BitString::from_index(n, best as u64),
        estimate_probability: register(best),
        result_one_probability: dist.result_bit_marginal(),
    })
}
