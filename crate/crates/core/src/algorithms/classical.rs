use rand::Rng as _;

use crate::error::{Error, Result};
use crate::oracles::{arm_projector, Flip, OracleModel, Registers, RewardVector};
use crate::qmat::{ComplexMatrix, PureState, ONE};
use crate::rng;
use crate::simulator::{run_exact, Circuit};

use super::RunResult;

/// Fixed-confidence best-arm problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    pub rewards: RewardVector,
    pub delta: f64,
    best: usize,
}

impl BanditInstance {
    pub fn new(rewards: RewardVector, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::Precondition(format!("delta {delta} outside (0, 1/2)")));
        }
        let best = rewards.best_arm()?;
        Ok(BanditInstance { rewards, delta, best })
    }

    pub fn n_arms(&self) -> usize {
        self.rewards.n_arms()
    }

    pub fn best_arm(&self) -> usize {
        self.best
    }
}

/// √(ln(4 N t² / δ) / (2t)) after t pulls of each surviving arm.
pub fn confidence_radius(n_arms: usize, t: u64, delta: f64) -> f64 {
    let t = t as f64;
    ((4.0 * n_arms as f64 * t * t / delta).ln() / (2.0 * t)).sqrt()
}

/// Successive elimination with `pull(arm_index, rng)` returning one reward.
fn successive_elimination(
    instance: &BanditInstance,
    seed: u64,
    mut pull: impl FnMut(usize, &mut rng::Rng) -> bool,
) -> RunResult {
    let n = instance.n_arms();
    let mut rng = rng::seeded(seed);
    let mut alive: Vec<usize> = (0..n).collect();
    let mut wins = vec![0u64; n];
    let mut pulls = vec![0u64; n];
    let mut t = 0u64;
    while alive.len() > 1 {
        t += 1;
        for &a in &alive {
            wins[a] += pull(a, &mut rng) as u64;
            pulls[a] += 1;
        }
        let r = confidence_radius(n, t, instance.delta);
        let mean = |a: usize| wins[a] as f64 / t as f64;
        let leader = alive.iter().map(|&a| mean(a)).fold(f64::NEG_INFINITY, f64::max);
        alive.retain(|&a| mean(a) + r >= leader - r);
    }
    let arm = alive[0] + 1;
    RunResult { arm, queries: pulls.iter().sum(), success: arm == instance.best_arm(), pulls, weights: Vec::new() }
}

/// Classical successive elimination on Bernoulli arms.
pub fn classical_successive_elimination(instance: &BanditInstance, seed: u64) -> RunResult {
    let means = instance.rewards.means().to_vec();
    successive_elimination(instance, seed, |a, rng| rng.random::<f64>() < means[a])
}

/// Successive elimination where each pull is one call of the one-time
/// channel on |i⟩|0⟩ followed by a reward-qubit measurement. The outcome law
/// of each arm is computed once by exact simulation and then sampled.
pub fn one_time_successive_elimination(instance: &BanditInstance, seed: u64) -> Result<RunResult> {
    let n = instance.n_arms();
    let regs = Registers::arms_reward(n);
    let model = OracleModel::one_time(instance.rewards.clone(), Flip::Bit, regs);
    let mut reward_one = ComplexMatrix::zeros(regs.dim(), regs.dim());
    for arm in 1..=n {
        let k = regs.index(arm, 0, 1, 0);
        reward_one[(k, k)] = ONE;
    }
    let reward_zero = &ComplexMatrix::identity(regs.dim()) - &reward_one;
    let circuit = Circuit::new(regs.dim()).oracle().measure(vec![reward_zero, reward_one]);
    let mut probs = Vec::with_capacity(n);
    for arm in 1..=n {
        let start = PureState::basis(regs.dim(), regs.index(arm, 0, 0, 0)).density();
        let t = run_exact(&circuit, &model, &start)?;
        // The arm register is untouched by the oracle.
        debug_assert!((t.final_state().matrix().trace_product(&arm_projector(arm, &regs)?).re - 1.0).abs() < 1e-9);
        probs.push(t.distribution[1]);
    }
    Ok(successive_elimination(instance, seed, |a, rng| rng.random::<f64>() < probs[a]))
}
