use crate::error::{invalid, Result};
use crate::oracle::OutcomeDistribution;
use crate::scalar::{half, Real};

/// Total-variation distance `½ Σ |p − q|`.
pub fn tv_distance<T: Real>(p: &OutcomeDistribution<T>, q: &OutcomeDistribution<T>) -> Result<T> {
    if p.n() != q.n() {
        return Err(invalid(format!(
            "distributions over n = {} and n = {}",
            p.n(),
            q.n()
        )));
    }
    tv_distance_tables(p.probabilities(), q.probabilities())
}

pub fn tv_distance_tables<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(invalid(format!(
            "supports of size {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(half::<T>() * p.iter().zip(q).map(|(&a, &b)| (a - b).abs()).sum::<T>())
}

/// Standard deviation of a binomial proportion.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half_width = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (
        (center - half_width).max(0.0),
        (center + half_width).min(1.0),
    )
}
