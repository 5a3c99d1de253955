use crate::error::{Error, Result};
use crate::oracles::{make_arm_oracle, make_channel_e, make_ox, Flip, RewardFamily, Registers};
use crate::qmat::{half_trace_norm, ComplexMatrix, DensityMatrix, PureState, C64};

use super::coupling::{coupling_angle, split_pure};

/// Largest arm count for which histories are enumerated.
pub const MAX_HISTORY_ARMS: usize = 3;
/// Largest horizon for which histories are enumerated.
pub const MAX_HISTORY_STEPS: usize = 4;

/// One history z_t = (x_1, …, x_t) with its weights and branch states.
#[derive(Debug, Clone)]
pub struct HistoryBranch {
    /// x_s for every step, arm k at position k − 1.
    pub history: Vec<Vec<bool>>,
    /// P^i(z_t)
    pub p_weight: f64,
    /// Q^i(z_t)
    pub q_weight: f64,
    /// ρ(z_t)
    pub rho: ComplexMatrix,
    /// ψ(z_t)
    pub psi: Vec<C64>,
}

/// Checks for the step from t to t + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryStep {
    /// |Σ P^i(z_{t+1}) − 1|
    pub p_sum_residual: f64,
    /// |Σ Q^i(z_{t+1}) − 1|
    pub q_sum_residual: f64,
    /// Smallest single weight of either measure.
    pub min_weight: f64,
    /// Trace norm of Σ P^i(z) ρ(z) − ρ^i_{t+1}.
    pub mixed_residual: f64,
    /// Trace norm of Σ Q^i(z) |ψ(z)⟩⟨ψ(z)| − ρ^0_{t+1}.
    pub pure_residual: f64,
}

/// Purity bookkeeping of one branch ρ̃(z_t) → ρ̃_c(z_t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPurity {
    /// Value c of the perturbed arm's reward.
    pub branch: bool,
    /// R(z_t) − R(z_{t+1})
    pub purity_drop: f64,
    /// tr(ρ̃ − O_i ρ̃ O_i†)²
    pub spread: f64,
    /// |purity_drop − a(1−a)·spread| with a the branch mixing weight.
    pub identity_residual: f64,
    /// purity_drop/(2Δ²) − spread.
    pub stated_margin: f64,
    /// 2·purity_drop/Δ² − spread.
    pub relaxed_margin: f64,
}

#[derive(Debug, Clone)]
pub struct HistoryDecomposition {
    pub arm: usize,
    pub horizon: usize,
    pub steps: Vec<HistoryStep>,
    pub purity: Vec<BranchPurity>,
    /// Histories of length `horizon`.
    pub branches: Vec<HistoryBranch>,
}

fn bernoulli(p: f64, bit: bool) -> f64 {
    if bit {
        p
    } else {
        1.0 - p
    }
}

fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(2.0 * half_trace_norm(m)?)
}

/// Decompositions ρ_t^i = Σ P^i(z_t) ρ(z_t) and ρ_t^0 = Σ Q^i(z_t) |ψ(z_t)⟩⟨ψ(z_t)|
/// for the circuit ρ ↦ ℰ(U_t ρ U_t†) repeated over `unitaries`.
///
/// On arm i the mixed branch states are perturbed towards each other,
/// ρ̃₀ = (1 − a₀)ρ̃ + a₀ O_iρ̃O_i† and ρ̃₁ = (1 − a₁)O_iρ̃O_i† + a₁ρ̃ with
/// a₀ = p₀Δ_i²/η and a₁ = (1 − p₀)Δ_i²/η, and the pure states are split
/// with the coupling angle for (p, q) = (p₀, p_i). Every other arm j applies
/// O_j on both sides when x_j = 1.
pub fn build_history_decomposition(
    family: &RewardFamily,
    arm: usize,
    unitaries: &[ComplexMatrix],
    initial: &PureState,
    flip: Flip,
) -> Result<HistoryDecomposition> {
    let n = family.n_arms();
    if n > MAX_HISTORY_ARMS || unitaries.len() > MAX_HISTORY_STEPS {
        return Err(Error::HistoryCap(format!(
            "N = {n}, T = {} exceeds N <= {MAX_HISTORY_ARMS}, T <= {MAX_HISTORY_STEPS}",
            unitaries.len()
        )));
    }
    if arm == 0 || arm > n {
        return Err(Error::ArmOutOfRange(arm, n));
    }
    let eta = family.eta();
    let widest = (1..=n).map(|j| family.gap(j)).fold(0.0, f64::max);
    if !(eta > 0.0) || widest * widest / eta > 0.5 {
        return Err(Error::Precondition(format!("requires max gap^2/eta <= 1/2, got {}", widest * widest / eta)));
    }
    let regs = match flip {
        Flip::Bit => Registers::arms_reward(n),
        Flip::Phase => Registers::arms(n),
    };
    if initial.dim() != regs.dim() {
        return Err(Error::DimMismatch(initial.dim(), regs.dim()));
    }
    if let Some(u) = unitaries.iter().find(|u| u.rows() != regs.dim() || u.cols() != regs.dim()) {
        return Err(Error::DimMismatch(u.rows(), regs.dim()));
    }

    let p0 = family.p0();
    let pi = family.base()[arm];
    let delta2 = family.gap(arm).powi(2);
    let a0 = p0 * delta2 / eta;
    let a1 = (1.0 - p0) * delta2 / eta;
    let perturbed = family.member(arm)?;
    let reference = family.member(0)?;
    let (cos_a, sin_a) = coupling_angle(p0, pi);
    let oracle = make_arm_oracle(arm, flip, &regs)?;
    let outcomes: Vec<Vec<bool>> = (0..1usize << n).map(|m| (0..n).map(|k| m >> k & 1 == 1).collect()).collect();
    let others: Vec<ComplexMatrix> = outcomes
        .iter()
        .map(|x| {
            let mut hat = x.clone();
            hat[arm - 1] = false;
            make_ox(&hat, flip, &regs)
        })
        .collect::<Result<_>>()?;
    let channel_i = make_channel_e(&perturbed, flip, &regs)?;
    let channel_0 = make_channel_e(&reference, flip, &regs)?;

    let mut branches = vec![HistoryBranch {
        history: Vec::new(),
        p_weight: 1.0,
        q_weight: 1.0,
        rho: initial.density().into_matrix(),
        psi: initial.amplitudes().to_vec(),
    }];
    let mut exact_i = initial.density().into_matrix();
    let mut exact_0 = exact_i.clone();
    let mut steps = Vec::with_capacity(unitaries.len());
    let mut purity = Vec::new();

    for u in unitaries {
        exact_i = channel_i.apply_matrix(&exact_i.conjugate_by(u));
        exact_0 = channel_0.apply_matrix(&exact_0.conjugate_by(u));
        let mut next = Vec::with_capacity(branches.len() << n);
        for b in &branches {
            let rho_t = b.rho.conjugate_by(u);
            let rotated = rho_t.conjugate_by(&oracle);
            let mut tilde0 = rho_t.scale_real(1.0 - a0);
            tilde0.add_scaled(&rotated, a0);
            let mut tilde1 = rotated.scale_real(1.0 - a1);
            tilde1.add_scaled(&rho_t, a1);

            let spread_m = &rho_t - &rotated;
            let spread = spread_m.trace_product(&spread_m).re;
            let r = rho_t.trace_product(&rho_t).re;
            for (c, tilde, a) in [(false, &tilde0, a0), (true, &tilde1, a1)] {
                let drop = r - tilde.trace_product(tilde).re;
                purity.push(BranchPurity {
                    branch: c,
                    purity_drop: drop,
                    spread,
                    identity_residual: (drop - a * (1.0 - a) * spread).abs(),
                    stated_margin: drop / (2.0 * delta2) - spread,
                    relaxed_margin: 2.0 * drop / delta2 - spread,
                });
            }

            let psi_t = u.mul_vec(&b.psi);
            let o_psi = oracle.mul_vec(&psi_t);
            let (bar0, bar1, psi0, psi1) = split_pure(&psi_t, &o_psi, pi, cos_a, sin_a)?;
            let q1: f64 = bar1.iter().map(|z| z.norm_sqr()).sum();
            let q0: f64 = bar0.iter().map(|z| z.norm_sqr()).sum();

            for (x, o_hat) in outcomes.iter().zip(&others) {
                let c = x[arm - 1];
                let p_cond: f64 = x.iter().enumerate().map(|(k, &bit)| bernoulli(perturbed.means()[k], bit)).product();
                let q_rest: f64 =
                    x.iter().enumerate().filter(|&(k, _)| k != arm - 1).map(|(k, &bit)| bernoulli(reference.means()[k], bit)).product();
                let (tilde, split, qc) = if c { (&tilde1, &psi1, q1) } else { (&tilde0, &psi0, q0) };
                let mut history = b.history.clone();
                history.push(x.clone());
                next.push(HistoryBranch {
                    history,
                    p_weight: b.p_weight * p_cond,
                    q_weight: b.q_weight * qc * q_rest,
                    rho: tilde.conjugate_by(o_hat),
                    psi: o_hat.mul_vec(split.amplitudes()),
                });
            }
        }
        branches = next;

        let dim = regs.dim();
        let mut mixed = ComplexMatrix::zeros(dim, dim);
        let mut pure = ComplexMatrix::zeros(dim, dim);
        for b in &branches {
            mixed.add_scaled(&b.rho, b.p_weight);
            pure.add_scaled(&ComplexMatrix::outer(&b.psi, &b.psi), b.q_weight);
        }
        steps.push(HistoryStep {
            p_sum_residual: (branches.iter().map(|b| b.p_weight).sum::<f64>() - 1.0).abs(),
            q_sum_residual: (branches.iter().map(|b| b.q_weight).sum::<f64>() - 1.0).abs(),
            min_weight: branches.iter().map(|b| b.p_weight.min(b.q_weight)).fold(f64::INFINITY, f64::min),
            mixed_residual: trace_norm(&(&mixed - &exact_i))?,
            pure_residual: trace_norm(&(&pure - &exact_0))?,
        });
    }

    Ok(HistoryDecomposition { arm, horizon: unitaries.len(), steps, purity, branches })
}

impl HistoryDecomposition {
    /// Σ P^i(z_T) ρ(z_T), or the initial state when the horizon is zero.
    pub fn mixed_state(&self) -> DensityMatrix {
        let dim = self.branches[0].rho.rows();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for b in &self.branches {
            m.add_scaled(&b.rho, b.p_weight);
        }
        DensityMatrix::from_matrix_unchecked(m)
    }

    /// Σ Q^i(z_T) |ψ(z_T)⟩⟨ψ(z_T)|.
    pub fn pure_mixture(&self) -> DensityMatrix {
        let dim = self.branches[0].psi.len();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for b in &self.branches {
            m.add_scaled(&ComplexMatrix::outer(&b.psi, &b.psi), b.q_weight);
        }
        DensityMatrix::from_matrix_unchecked(m)
    }
}
