use crate::error::{Error, Result};
use crate::oracles::RewardVector;

/// H(p) = Σ_{i>1} (p₁ − p_i)⁻² over the means sorted in descending order.
pub fn complexity_h(p: &RewardVector) -> Result<f64> {
    p.best_arm()?;
    let mut means = p.means().to_vec();
    means.sort_by(|a, b| b.total_cmp(a));
    Ok(means[1..].iter().map(|&x| (means[0] - x).powi(-2)).sum())
}

/// Query lower bound (1 − p)(1 − 4δ(1 − δ))² N / p for Grover search through
/// the faulty channel.
pub fn grover_lower_bound(n: usize, p: f64, delta: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::BoundUndefined(p));
    }
    if !(0.0..=0.5).contains(&delta) {
        return Err(Error::Precondition(format!("delta {delta} outside [0, 1/2]")));
    }
    Ok((1.0 - p) * (1.0 - 4.0 * delta * (1.0 - delta)).powi(2) * n as f64 / p)
}

/// c(δ, η) = (η(1 − 2√(δ(1 − δ)))/20)².
pub fn optimal_constant(delta: f64, eta: f64) -> f64 {
    (eta * (1.0 - 2.0 * (delta * (1.0 - delta)).sqrt()) / 20.0).powi(2)
}

/// Largest fidelity F compatible with telling two states apart with
/// success probability 1 − δ: 4δ(1 − δ).
pub fn fidelity_ceiling(delta: f64) -> f64 {
    4.0 * delta * (1.0 - delta)
}
