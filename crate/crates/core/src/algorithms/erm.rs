use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::oracles::{erm_registers, make_erm_oracle, RewardTable, RewardVector};
use crate::qmat::{ComplexMatrix, C64, ZERO};
use crate::rng;

use super::RunResult;

/// Largest ω register tried when building a table with exact means.
const MAX_OMEGA: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeEstimate {
    pub estimate: f64,
    pub queries: u64,
    /// Phase-register size M.
    pub resolution: usize,
    /// Weight of the reward-1 branch after one query on the uniform-ω state.
    pub branch_weight: f64,
}

/// Smallest power of two M with π/M + π²/M² ≤ ε.
pub fn ae_resolution(eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps {eps} must be positive")));
    }
    let mut m = 1usize;
    while PI / m as f64 + (PI / m as f64).powi(2) > eps {
        m *= 2;
    }
    Ok(m)
}

/// Fejér kernel |sin(Mπd) / (M sin(πd))|².
fn fejer(m: usize, d: f64) -> f64 {
    let den = (PI * d).sin();
    if den.abs() < 1e-12 {
        return 1.0;
    }
    let r = (m as f64 * PI * d).sin() / (m as f64 * den);
    r * r
}

/// Outcome law of amplitude estimation with M phase states when the good
/// branch has weight sin²θ: the two eigenphases ±2θ of the Grover operator
/// each contribute a Fejér peak.
fn ae_distribution(m: usize, weight: f64) -> Vec<f64> {
    let theta = weight.clamp(0.0, 1.0).sqrt().asin();
    let x = theta / PI;
    (0..m).map(|y| 0.5 * (fejer(m, x - y as f64 / m as f64) + fejer(m, -x - y as f64 / m as f64))).collect()
}

/// Amplitude estimation of r_arm's mean: one ERM query on
/// |arm⟩ ⊗ uniform ω ⊗ |0⟩ prepares the state whose reward-1 branch has
/// weight p_arm, and M − 1 Grover steps (two queries each) feed the phase
/// register. The estimate is sin²(πy/M) for the sampled outcome y.
pub fn erm_mean_estimate(arm: usize, table: &RewardTable, eps: f64, rng: &mut rng::Rng) -> Result<AmplitudeEstimate> {
    estimate_with(arm, table, &make_erm_oracle(table)?, eps, rng)
}

fn estimate_with(arm: usize, table: &RewardTable, oracle: &ComplexMatrix, eps: f64, rng: &mut rng::Rng) -> Result<AmplitudeEstimate> {
    if arm == 0 || arm > table.n_arms() {
        return Err(Error::ArmOutOfRange(arm, table.n_arms()));
    }
    let m = ae_resolution(eps)?;
    let regs = erm_registers(table);
    let mut state = vec![ZERO; regs.dim()];
    let amp = C64::new(1.0 / (regs.n_omega as f64).sqrt(), 0.0);
    for omega in 0..regs.n_omega {
        state[regs.index(arm, omega, 0, 0)] = amp;
    }
    let state = oracle.mul_vec(&state);
    let weight: f64 = (0..regs.n_omega).map(|omega| state[regs.index(arm, omega, 1, 0)].norm_sqr()).sum();
    let y = rng::sample_index(&ae_distribution(m, weight), rng);
    Ok(AmplitudeEstimate {
        estimate: (PI * y as f64 / m as f64).sin().powi(2),
        queries: 2 * (m as u64 - 1) + 1,
        resolution: m,
        branch_weight: weight,
    })
}

/// Smallest ω register on which every mean is a multiple of 1/M.
fn exact_table(rewards: &RewardVector) -> Result<RewardTable> {
    for m in 1..=MAX_OMEGA {
        if let Ok(t) = RewardTable::from_means(rewards.means(), m) {
            return Ok(t);
        }
    }
    Err(Error::TableSize(format!("no table with at most {MAX_OMEGA} omega values")))
}

/// Best arm with the ERM oracle: each arm's mean is estimated at accuracy
/// ε/2 and the largest estimate wins (ties go to the lower index).
pub fn erm_best_arm(rewards: &RewardVector, eps: f64, seed: u64) -> Result<RunResult> {
    let best = rewards.best_arm()?;
    let table = exact_table(rewards)?;
    let oracle = make_erm_oracle(&table)?;
    let mut rng = rng::seeded(seed);
    let mut queries = 0;
    let mut weights = Vec::with_capacity(rewards.n_arms());
    for arm in 1..=rewards.n_arms() {
        let e = estimate_with(arm, &table, &oracle, eps / 2.0, &mut rng)?;
        queries += e.queries;
        weights.push(e.estimate);
    }
    let arm = weights.iter().enumerate().fold(0, |b, (k, &w)| if w > weights[b] { k } else { b }) + 1;
    Ok(RunResult { arm, queries, success: arm == best, pulls: Vec::new(), weights })
}
