use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::oracles::{make_self_indicating_oracle, ArmChannel, Flip, OracleModel, Registers, RewardVector};
use crate::qmat::{gates, partial_trace, tensor, tensor_vec, ComplexMatrix, DensityMatrix, PureState, Subsystems, C64, ONE};
use crate::rng;
use crate::simulator::{run_exact, Circuit};
use crate::tol::DEFAULT;

use super::RunResult;

/// Slack added before flooring the horizon so exact integers survive rounding.
const FLOOR_SLACK: f64 = 1e-9;

/// Parameters of Grover search with the self-indicating faulty oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultyGroverPlan {
    pub n_arms: usize,
    pub p: f64,
    /// θ = 2·arcsin(N^{−1/2}).
    pub theta: f64,
    /// ⌊π/(2θp)⌋ oracle calls.
    pub rounds: usize,
}

impl FaultyGroverPlan {
    pub fn new(n_arms: usize, p: f64) -> Result<Self> {
        if n_arms < 2 {
            return Err(Error::Precondition("search needs at least two arms".into()));
        }
        if p == 0.0 {
            return Err(Error::OracleNeverFires);
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadProbability(p));
        }
        let theta = 2.0 * (1.0 / (n_arms as f64).sqrt()).asin();
        let rounds = (PI / (2.0 * theta * p) + FLOOR_SLACK).floor() as usize;
        Ok(FaultyGroverPlan { n_arms, p, theta, rounds })
    }

    /// Σ_k Bin(T, p)(k) · sin²((2k+1)θ/2).
    pub fn success_probability(&self) -> f64 {
        binomial_pmf(self.rounds, self.p)
            .iter()
            .enumerate()
            .map(|(k, w)| w * ((2 * k + 1) as f64 * self.theta / 2.0).sin().powi(2))
            .sum()
    }
}

/// Bin(n, p) probabilities for k = 0..=n.
pub(crate) fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut choose = 1.0;
    (0..=n)
        .map(|k| {
            if k > 0 {
                choose *= (n - k + 1) as f64 / k as f64;
            }
            choose * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
        })
        .collect()
}

/// 2|s⟩⟨s| − Id on N arms.
pub fn grover_diffusion(n: usize) -> ComplexMatrix {
    let s = PureState::uniform(n);
    let two_ss = ComplexMatrix::outer(s.amplitudes(), s.amplitudes()).scale_real(2.0);
    &two_ss - &ComplexMatrix::identity(n)
}

fn check_target(n: usize, target: usize) -> Result<()> {
    if target == 0 || target > n {
        return Err(Error::ArmOutOfRange(target, n));
    }
    Ok(())
}

/// Arm-register state Σ_k Bin(T, p)(k) |G^k s⟩⟨G^k s| with G = (2|s⟩⟨s| − Id)·Õ_i.
pub fn self_flag_reduced(n: usize, p: f64, target: usize, rounds: usize) -> Result<DensityMatrix> {
    check_target(n, target)?;
    let weights = binomial_pmf(rounds, p);
    let mut psi = PureState::uniform(n).amplitudes().to_vec();
    let mut acc = ComplexMatrix::zeros(n, n);
    for (k, w) in weights.iter().enumerate() {
        if k > 0 {
            psi[target - 1] = -psi[target - 1];
            let mean = psi.iter().sum::<C64>() / n as f64;
            for a in psi.iter_mut() {
                *a = mean * 2.0 - *a;
            }
        }
        acc.add_scaled(&ComplexMatrix::outer(&psi, &psi), *w);
    }
    Ok(DensityMatrix::from_matrix_unchecked(acc))
}

/// Swap of qubits `a` and `b` on `n_qubits` qubits (qubit 0 most significant),
/// tensored after a leading factor of dimension `lead`.
fn swap_qubits(lead: usize, n_qubits: usize, a: usize, b: usize) -> ComplexMatrix {
    let dim = lead << n_qubits;
    let (sa, sb) = (n_qubits - 1 - a, n_qubits - 1 - b);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for from in 0..dim {
        let (x, y) = ((from >> sa) & 1, (from >> sb) & 1);
        let to = (from & !(1 << sa) & !(1 << sb)) | (y << sa) | (x << sb);
        m[(to, from)] = ONE;
    }
    m
}

/// The self-flag algorithm on arms ⊗ flag qubit ⊗ T ancillas: each round
/// applies the faulty oracle channel, the flag-controlled diffusion and a
/// swap of the flag into ancilla t. Returns the arm-register marginal.
pub fn self_flag_full_register(n: usize, p: f64, target: usize, rounds: usize) -> Result<DensityMatrix> {
    check_target(n, target)?;
    let dim = (n * 2) << rounds;
    if dim > DEFAULT.dim_cap {
        return Err(Error::DimensionCap(dim, DEFAULT.dim_cap));
    }
    let ancilla_id = ComplexMatrix::identity(1 << rounds);
    let oracle = tensor(&make_self_indicating_oracle(target, &Registers::arms_reward(n))?, &ancilla_id)?;
    let channel = ArmChannel { arm: target, p, oracle };
    let flag0 = ComplexMatrix::from_diag(&[1.0, 0.0]);
    let flag1 = ComplexMatrix::from_diag(&[0.0, 1.0]);
    let controlled = &tensor(&grover_diffusion(n), &flag1)? + &tensor(&ComplexMatrix::identity(n), &flag0)?;
    let controlled = tensor(&controlled, &ancilla_id)?;

    let mut start = PureState::uniform(n).amplitudes().to_vec();
    start = tensor_vec(&start, &gates::basis(2 << rounds, 0));
    let mut rho = PureState::new(start)?.density().into_matrix();
    for t in 1..=rounds {
        rho = channel.apply_matrix(&rho);
        rho = rho.conjugate_by(&controlled);
        rho = rho.conjugate_by(&swap_qubits(n, rounds + 1, 0, t));
    }
    let dims = [n, 2, 1 << rounds];
    let full = DensityMatrix::from_matrix_unchecked(rho);
    partial_trace(&full, &Subsystems::new(&dims, &[0]))
}

/// Runs the self-flag algorithm in its reduced form and samples the
/// arm-register measurement.
pub fn faulty_grover_self_indicating(n: usize, p: f64, target: usize, seed: u64) -> Result<RunResult> {
    let plan = FaultyGroverPlan::new(n, p)?;
    let rho = self_flag_reduced(n, p, target, plan.rounds)?;
    let weights: Vec<f64> = (0..n).map(|k| rho.matrix()[(k, k)].re.max(0.0)).collect();
    let arm = rng::sample_index(&weights, &mut rng::seeded(seed)) + 1;
    Ok(RunResult { arm, queries: plan.rounds as u64, success: arm == target, pulls: Vec::new(), weights })
}

/// Success probability P(measure target) after each of 0..=max_rounds
/// Grover rounds whose oracle call is the faulty channel ℱ_i^p.
pub fn grover_channel_curve(n: usize, p: f64, target: usize, max_rounds: usize) -> Result<Vec<f64>> {
    check_target(n, target)?;
    let mut means = vec![0.0; n];
    means[target - 1] = p;
    let model = OracleModel::one_time(RewardVector::new(means, 0.0)?, Flip::Phase, Registers::arms(n));
    let mut circuit = Circuit::new(n);
    let diffusion = grover_diffusion(n);
    for _ in 0..max_rounds {
        circuit = circuit.oracle().unitary(diffusion.clone());
    }
    let t = run_exact(&circuit, &model, &PureState::uniform(n).density())?;
    Ok((0..=max_rounds).map(|r| t.states[2 * r].matrix()[(target - 1, target - 1)].re).collect())
}

/// Success probability after `rounds` Grover rounds under the faulty channel.
pub fn grover_under_faulty_channel(n: usize, p: f64, target: usize, rounds: usize) -> Result<f64> {
    Ok(*grover_channel_curve(n, p, target, rounds)?.last().expect("curve includes round 0"))
}
