//! Closed-form quantities behind the depolarizing-noise analysis: the loose
//! Chernoff bound, the parity-flip probability `ζ_a`, the effective label
//! error rate `η′`, and the retained-count planner for the majority-vote
//! learner.

use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Result};
use crate::scalar::{half, lit, Real};

fn check_noise<T: Real>(eta: T) -> Result<()> {
    if !(eta >= T::zero() && eta < half()) {
        return Err(invalid(format!("noise rate {eta} outside [0, 1/2)")));
    }
    Ok(())
}

fn check_open_noise<T: Real>(eta: T) -> Result<()> {
    if !(eta > T::zero() && eta < half()) {
        return Err(invalid(format!("noise rate {eta} outside (0, 1/2)")));
    }
    Ok(())
}

fn check_weight(n: usize, weight: usize) -> Result<()> {
    if n == 0 || weight > n {
        return Err(invalid(format!("weight {weight} with n = {n}")));
    }
    Ok(())
}

/// `B_k(η, δ) = 2·exp(−δ²ηk/3)`. This is a bound, so values above 1 are expected
/// for small `k`.
pub fn chernoff_bound<T: Real>(k: u64, eta: T, delta: T) -> Result<T> {
    if !(eta > T::zero() && eta <= T::one()) {
        return Err(invalid(format!("Chernoff mean rate {eta} outside (0, 1]")));
    }
    if !(delta > T::zero() && delta < T::one()) {
        return Err(invalid(format!(
            "Chernoff deviation {delta} outside (0, 1)"
        )));
    }
    let k = T::from_u64(k).expect("k representable");
    Ok(lit::<T>(2.0) * (-(delta * delta * eta * k) / lit(3.0)).exp())
}

/// Probability that independent bit flips at rate `eta` on an `n`-bit input
/// change the value of a parity of Hamming weight `weight`:
/// `(1 − (1 − 2η)^{|a|}) / 2`.
pub fn zeta<T: Real>(n: usize, weight: usize, eta: T) -> Result<T> {
    check_weight(n, weight)?;
    check_noise(eta)?;
    let bias = T::one() - lit::<T>(2.0) * eta;
    Ok((T::one() - bias.powi(weight as i32)) * half())
}

/// The same probability as [`zeta`] summed term by term over the total number
/// of flips `w` and the odd number `k` of them landing on relevant bits:
/// `Σ_w Σ_{k odd} C(|a|,k)·C(n−|a|,w−k)·η^w(1−η)^{n−w}`.
///
/// Binomials go through log-gamma so large `n` does not overflow. Kept as a
/// reference for [`zeta`]; it costs `O(n²)`.
pub fn zeta_double_sum<T: Real>(n: usize, weight: usize, eta: T) -> Result<T> {
    check_weight(n, weight)?;
    check_noise(eta)?;
    if eta == T::zero() {
        return Ok(T::zero());
    }
    let ln_eta = eta.ln();
    let ln_keep = (T::one() - eta).ln();
    let ln_choose = |m: usize, r: usize| -> T { lit(ln_binomial(m as u64, r as u64)) };
    let mut total = T::zero();
    for w in 1..=n {
        let ln_pattern =
            T::from_usize(w).unwrap() * ln_eta + T::from_usize(n - w).unwrap() * ln_keep;
        for k in (1..=w.min(weight)).step_by(2) {
            if w - k > n - weight {
                continue;
            }
            total =
                total + (ln_choose(weight, k) + ln_choose(n - weight, w - k) + ln_pattern).exp();
        }
    }
    Ok(total)
}

/// Label error rate of the dephased depolarizing oracle,
/// `η′ = η(1 − ζ_a) + ζ_a(1 − η)`.
pub fn effective_error_rate<T: Real>(n: usize, weight: usize, eta: T) -> Result<T> {
    let z = zeta(n, weight, eta)?;
    Ok(eta * (T::one() - z) + z * (T::one() - eta))
}

/// Half of the tighter of the two admissible caps on `δ′`:
/// `δ′ < η/(1−η)` and `δ′ < 1 − 1/(2((1−2η)(1−η)+η))`.
pub fn select_delta_prime<T: Real>(eta: T) -> Result<T> {
    check_open_noise(eta)?;
    let one = T::one();
    let two: T = lit(2.0);
    let ratio_cap = eta / (one - eta);
    let vote_cap = one - one / (two * ((one - two * eta) * (one - eta) + eta));
    Ok(ratio_cap.min(vote_cap) * half())
}

/// `η̃ = η(1 − (1 + δ′)(1 − η))`, positive whenever `0 ≤ δ′ < η/(1−η)`.
pub fn eta_tilde<T: Real>(eta: T, delta_prime: T) -> Result<T> {
    check_noise(eta)?;
    let one = T::one();
    if !(delta_prime >= T::zero() && delta_prime < eta / (one - eta)) {
        return Err(invalid(format!(
            "delta' = {delta_prime} must lie in [0, eta/(1-eta)) for eta = {eta}"
        )));
    }
    Ok(eta * (one - (one + delta_prime) * (one - eta)))
}

/// Retained-count plan for the majority-vote learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerResult<T> {
    pub delta_prime: T,
    pub eta_tilde: T,
    /// Number of `b = 1` outcomes to retain.
    pub k_prime: u64,
    /// Hard cap on queries, `3·k_prime`.
    pub total_queries: u64,
}

/// The smallest `k′` strictly above `3/((δ′)²·η̃) · ln(4n/δ)`.
pub fn plan_retained_count<T: Real>(n: usize, eta: T, delta: T) -> Result<PlannerResult<T>> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(delta > T::zero() && delta < T::one()) {
        return Err(invalid(format!(
            "failure probability {delta} outside (0, 1)"
        )));
    }
    let delta_prime = select_delta_prime(eta)?;
    let eta_tilde = eta_tilde(eta, delta_prime)?;
    let n_real = T::from_usize(n).unwrap();
    let threshold = lit::<T>(3.0) / (delta_prime * delta_prime * eta_tilde)
        * (lit::<T>(4.0) * n_real / delta).ln();
    let k_prime = threshold
        .floor()
        .to_u64()
        .and_then(|k| k.checked_add(1))
        .ok_or_else(|| invalid(format!("retained count {threshold} overflows")))?;
    Ok(PlannerResult {
        delta_prime,
        eta_tilde,
        k_prime,
        total_queries: 3 * k_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn chernoff_examples() {
        assert_eq!(chernoff_bound(0, 0.3, 0.5).unwrap(), 2.0);
        assert!(close(
            chernoff_bound(3, 1.0, 0.999_999_999_999).unwrap(),
            2.0 * (-1.0f64).exp(),
            1e-9
        ));
        assert!(close(
            chernoff_bound(300, 0.1, 0.5).unwrap(),
            2.0 * (-2.5f64).exp(),
            1e-12
        ));
        assert!(close(2.0 * (-2.5f64).exp(), 0.164170, 1e-6));
        assert!(chernoff_bound(3, 0.0, 0.5).is_err());
        assert!(chernoff_bound(3, 0.5, 1.0).is_err());
    }

    #[test]
    fn zeta_examples() {
        for n in [1, 5, 40] {
            assert_eq!(zeta(n, 0, 0.3).unwrap(), 0.0);
        }
        assert!(close(zeta(1, 1, 0.1).unwrap(), 0.1, 1e-15));
        assert!(close(zeta(10, 3, 0.1).unwrap(), 0.244, 1e-15));
        assert!(zeta(3, 4, 0.1).is_err());
        assert!(zeta(3, 1, 0.5).is_err());
    }

    /// Probability over all 2^n flip patterns that an odd number of the first
    /// `weight` coordinates flip.
    fn brute_force_zeta(n: usize, weight: usize, eta: f64) -> f64 {
        let relevant = if weight == 64 {
            u64::MAX
        } else {
            (1u64 << weight) - 1
        };
        (0..1u64 << n)
            .filter(|e| (e & relevant).count_ones() % 2 == 1)
            .map(|e| {
                let w = e.count_ones() as i32;
                eta.powi(w) * (1.0 - eta).powi(n as i32 - w)
            })
            .sum()
    }

    #[test]
    fn zeta_three_routes_agree() {
        for n in 1..=12 {
            for weight in 0..=n {
                for &eta in &[0.05, 0.1, 0.25, 0.4] {
                    let closed = zeta(n, weight, eta).unwrap();
                    let sum = zeta_double_sum(n, weight, eta).unwrap();
                    let brute = brute_force_zeta(n, weight, eta);
                    assert!(close(closed, brute, 1e-12), "n={n} w={weight} eta={eta}");
                    assert!(close(sum, brute, 1e-12), "n={n} w={weight} eta={eta}");
                }
            }
        }
    }

    #[test]
    fn zeta_double_sum_large_n_finite() {
        let v = zeta_double_sum(200, 70, 0.1).unwrap();
        assert!(close(v, zeta(200, 70, 0.1).unwrap(), 1e-10));
    }

    #[test]
    fn effective_rate_examples() {
        assert_eq!(effective_error_rate(7, 0, 0.2).unwrap(), 0.2);
        assert!(close(effective_error_rate(1, 1, 0.1).unwrap(), 0.18, 1e-15));
        assert!(close(
            effective_error_rate(10, 3, 0.1).unwrap(),
            0.2952,
            1e-15
        ));
        assert!(close(0.2952, (1.0 - 0.8f64.powi(4)) / 2.0, 1e-15));
    }

    #[test]
    fn effective_rate_in_band() {
        for n in 1..=30 {
            for weight in 0..=n {
                for i in 0..50 {
                    let eta = i as f64 / 100.0;
                    let e = effective_error_rate(n, weight, eta).unwrap();
                    assert!(e >= eta - 1e-15 && e <= 1.0 - eta + 1e-15);
                }
            }
        }
    }

    #[test]
    fn delta_prime_examples() {
        assert!(close(select_delta_prime(0.25).unwrap(), 0.1, 1e-15));
        let expected = 0.5 * (1.0 - 1.0 / 1.01);
        assert!(close(select_delta_prime(0.45).unwrap(), expected, 1e-15));
        assert!(close(expected, 0.004950, 1e-6));
        let tiny = select_delta_prime(1e-6).unwrap();
        assert!(close(tiny, 0.5 * 1e-6 / (1.0 - 1e-6), 1e-18));
        assert!(select_delta_prime(0.0).is_err());
        assert!(select_delta_prime(0.5).is_err());
    }

    #[test]
    fn delta_prime_satisfies_both_caps_strictly() {
        for i in 1..499 {
            let eta = i as f64 / 1000.0;
            let d = select_delta_prime(eta).unwrap();
            assert!(d > 0.0);
            assert!(d < eta / (1.0 - eta));
            assert!(1.0 - d > 0.5 / ((1.0 - 2.0 * eta) * (1.0 - eta) + eta));
            let t = eta_tilde(eta, d).unwrap();
            assert!(t > 0.0);
            assert!(t <= (1.0 - d) * (1.0 - eta) * (1.0 - eta));
        }
    }

    #[test]
    fn eta_tilde_examples() {
        assert!(close(eta_tilde(0.25, 1.0 / 6.0).unwrap(), 0.03125, 1e-15));
        assert!(close(eta_tilde(0.3, 0.0).unwrap(), 0.09, 1e-15));
        assert!(close(eta_tilde(0.4, 0.1).unwrap(), 0.136, 1e-15));
        assert!(eta_tilde(0.25, 1.0 / 3.0).is_err());
        assert!(eta_tilde(0.25, -0.1).is_err());
    }

    #[test]
    fn planner_example() {
        let plan = plan_retained_count(64, 0.25, 0.01).unwrap();
        assert!(close(plan.delta_prime, 0.1, 1e-15));
        // 0.25·(1 − 1.1·0.75) = 0.25·0.175
        assert!(close(plan.eta_tilde, 0.04375, 1e-15));
        let threshold = 3.0 / (0.01 * 0.04375) * (25600.0f64).ln();
        assert_eq!(plan.k_prime, threshold.floor() as u64 + 1);
        assert!((69_500..69_700).contains(&plan.k_prime));
        assert_eq!(plan.total_queries, 3 * plan.k_prime);
    }

    #[test]
    fn planner_monotone_in_delta_and_log_in_n() {
        let a = plan_retained_count(64, 0.2, 0.01).unwrap().k_prime;
        let b = plan_retained_count(64, 0.2, 0.001).unwrap().k_prime;
        assert!(b > a);
        let n = 100usize;
        let delta = 0.05;
        let base = plan_retained_count(n, 0.3, delta).unwrap();
        let doubled = plan_retained_count(2 * n, 0.3, delta).unwrap();
        let c = 3.0 / (base.delta_prime * base.delta_prime * base.eta_tilde);
        let expected_ratio = (8.0 * n as f64 / delta).ln() / (4.0 * n as f64 / delta).ln();
        let raw_ratio = (c * (8.0 * n as f64 / delta).ln()) / (c * (4.0 * n as f64 / delta).ln());
        assert!(close(raw_ratio, expected_ratio, 1e-12));
        assert!(((doubled.k_prime as f64 / base.k_prime as f64) - expected_ratio).abs() < 1e-3);
    }

    #[test]
    fn planner_polynomial_near_half() {
        let mut min_ratio = f64::INFINITY;
        for i in 0..=99 {
            let eta = 0.4 + i as f64 * 0.001;
            let d = select_delta_prime(eta).unwrap();
            let t = eta_tilde(eta, d).unwrap();
            min_ratio = min_ratio.min(d * d * t / (0.5 - eta).powi(4));
        }
        assert!(min_ratio > 0.1, "min ratio {min_ratio}");
    }

    #[test]
    fn k_prime_grows_logarithmically() {
        let ks: Vec<f64> = (4..=16)
            .map(|p| plan_retained_count(1usize << p, 0.2, 0.01).unwrap().k_prime as f64)
            .collect();
        let steps: Vec<f64> = ks.windows(2).map(|w| w[1] - w[0]).collect();
        let mean = steps.iter().sum::<f64>() / steps.len() as f64;
        assert!(steps.iter().all(|s| (s - mean).abs() <= 0.01 * mean));
    }

    #[test]
    fn generic_over_f32() {
        let z: f32 = zeta(10, 3, 0.1f32).unwrap();
        assert!((z - 0.244).abs() < 1e-6);
        let plan = plan_retained_count(64, 0.25f32, 0.01f32).unwrap();
        let plan64 = plan_retained_count(64, 0.25f64, 0.01f64).unwrap();
        assert!((plan.k_prime as i64 - plan64.k_prime as i64).abs() <= 2);
    }
}
