use rand::Rng as _;

use crate::error::{Error, Result};
use crate::oracles::{arm_projector, Flip, OracleModel, Registers, RewardFamily, RewardVector};
use crate::qmat::{helstrom_success, ComplexMatrix, DensityMatrix, PureState};
use crate::rng;
use crate::simulator::{run_paired, Circuit, PairedTranscript};

use super::complexity::fidelity_ceiling;

/// Longest horizon enumerated by [`classical_ledger`].
pub const MAX_LEDGER_STEPS: usize = 16;
/// Largest arm count accepted by [`classical_ledger`].
pub const MAX_LEDGER_ARMS: usize = 4;

/// Deterministic classical policy: the arm (1-based) pulled after the
/// given (arm, reward) history.
pub type Policy<'a> = dyn Fn(&[(usize, bool)]) -> usize + Sync + 'a;

/// Pulls arms 1, 2, …, N, 1, 2, … regardless of rewards.
pub fn round_robin(n_arms: usize) -> impl Fn(&[(usize, bool)]) -> usize + Sync {
    move |h| h.len() % n_arms + 1
}

/// A fixed pseudo-random deterministic policy: the arm is drawn from the
/// stream keyed by the encoded history, so equal histories give equal arms.
pub fn random_policy(n_arms: usize, seed: u64) -> impl Fn(&[(usize, bool)]) -> usize + Sync {
    move |h| {
        let code = h.iter().fold(1u64, |c, &(a, r)| c.wrapping_mul(2 * n_arms as u64) + 2 * (a as u64 - 1) + r as u64);
        rng::stream(seed, code).random_range(1..=n_arms)
    }
}

/// Per-step quantities of the transcript-fidelity ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalLedgerStep {
    /// √F(Z_t^j, Z_t^0)
    pub fidelity: f64,
    /// Σ_{z_t} √(P^j P^0) d^j(z_t)
    pub damped: f64,
    /// Σ_{z_{t−1}} √(P^j P^0) d^j(z_{t−1}) 1[a_t = j]
    pub damped_pull_weight: f64,
    /// P^0(A_t = j)
    pub pull_probability: f64,
    /// Margin of √F_t ≥ √F_{t−1} − k Σ √(P^j P^0) 1[a_t = j], k = Δ²/(4η(1−η)).
    pub recursion_margin: f64,
    /// Margin of the damped recursion with constant 2k.
    pub damped_recursion_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalLedger {
    pub arm: usize,
    pub gap: f64,
    pub steps: Vec<ClassicalLedgerStep>,
    /// min over z_T of 1/k − Σ_t d^j(z_{t−1})² 1[a_t = j]; `None` when Δ = 0.
    pub geometric_margin: Option<f64>,
    /// √F_T − Σ_{z_T} √(P^j P^0) d^j(z_T)
    pub fidelity_over_damped: f64,
    /// Σ √(P^j P^0) d^j(z_T) − (1 − 2k Σ_t B_t)
    pub damped_lower_margin: f64,
    /// (Σ_t P^0(A_t = j))^{1/2} · 2√(η(1−η))/Δ − Σ_t B_t; `None` when Δ = 0.
    pub cauchy_schwarz_margin: Option<f64>,
    /// Σ_t Σ √(P^j P^0) d² 1[a_t = j] − (1 − √F_T)/(2k), the squared-decay
    /// variant. Reported only; it is not implied by the other inequalities.
    pub squared_decay_margin: Option<f64>,
}

impl ClassicalLedger {
    /// Smallest margin among the asserted inequalities.
    pub fn min_margin(&self) -> f64 {
        let mut m = self.fidelity_over_damped.min(self.damped_lower_margin);
        for s in &self.steps {
            m = m.min(s.recursion_margin).min(s.damped_recursion_margin);
        }
        for x in [self.geometric_margin, self.cauchy_schwarz_margin].into_iter().flatten() {
            m = m.min(x);
        }
        m
    }
}

struct Node {
    history: Vec<(usize, bool)>,
    p_alt: f64,
    p_ref: f64,
    pulls: u32,
    /// Σ_t d(z_{t−1})² 1[a_t = j] along this history.
    geometric: f64,
}

/// Exhaustive transcript ledger for a family member j against p⁰.
pub fn classical_ledger(family: &RewardFamily, arm: usize, policy: &Policy, horizon: usize) -> Result<ClassicalLedger> {
    classical_ledger_pair(&family.member(arm)?, &family.member(0)?, arm, policy, horizon)
}

/// Ledger for two reward vectors that differ at most on `arm`; η is taken
/// from `reference`.
pub fn classical_ledger_pair(
    alt: &RewardVector,
    reference: &RewardVector,
    arm: usize,
    policy: &Policy,
    horizon: usize,
) -> Result<ClassicalLedger> {
    let n = reference.n_arms();
    if horizon > MAX_LEDGER_STEPS || n > MAX_LEDGER_ARMS {
        return Err(Error::HistoryCap(format!(
            "N = {n}, T = {horizon} exceeds N <= {MAX_LEDGER_ARMS}, T <= {MAX_LEDGER_STEPS}"
        )));
    }
    if alt.n_arms() != n {
        return Err(Error::DimMismatch(alt.n_arms(), n));
    }
    if arm == 0 || arm > n {
        return Err(Error::ArmOutOfRange(arm, n));
    }
    if (1..=n).any(|k| k != arm && alt.mean(k) != reference.mean(k)) {
        return Err(Error::Precondition("reward vectors differ outside the perturbed arm".into()));
    }
    let eta = reference.eta();
    if !(eta > 0.0) {
        return Err(Error::Precondition("ledger requires eta > 0".into()));
    }
    let gap = (alt.mean(arm) - reference.mean(arm)).abs();
    let k = gap * gap / (4.0 * eta * (1.0 - eta));
    if k > 1.0 {
        return Err(Error::Precondition(format!("decay base 1 - gap^2/(4 eta (1 - eta)) = {} is negative", 1.0 - k)));
    }
    let decay = |pulls: u32| (1.0 - k).powi(pulls as i32);

    let mut nodes = vec![Node { history: Vec::new(), p_alt: 1.0, p_ref: 1.0, pulls: 0, geometric: 0.0 }];
    let mut steps = Vec::with_capacity(horizon);
    let (mut fid_prev, mut damped_prev) = (1.0, 1.0);
    let mut damped_pull_total = 0.0;
    let mut squared_total = 0.0;
    let mut pull_total = 0.0;

    for _ in 0..horizon {
        let mut next = Vec::with_capacity(2 * nodes.len());
        let (mut pull_weight, mut damped_pull_weight, mut squared, mut pull_probability) = (0.0, 0.0, 0.0, 0.0);
        for node in nodes {
            let a = policy(&node.history);
            if a == 0 || a > n {
                return Err(Error::ArmOutOfRange(a, n));
            }
            let joint = (node.p_alt * node.p_ref).sqrt();
            let d = decay(node.pulls);
            let hit = a == arm;
            if hit {
                pull_weight += joint;
                damped_pull_weight += joint * d;
                squared += joint * d * d;
                pull_probability += node.p_ref;
            }
            for r in [false, true] {
                let bern = |p: f64| if r { p } else { 1.0 - p };
                let mut history = node.history.clone();
                history.push((a, r));
                next.push(Node {
                    history,
                    p_alt: node.p_alt * bern(alt.mean(a)),
                    p_ref: node.p_ref * bern(reference.mean(a)),
                    pulls: node.pulls + hit as u32,
                    geometric: node.geometric + if hit { d * d } else { 0.0 },
                });
            }
        }
        nodes = next;
        let fidelity: f64 = nodes.iter().map(|z| (z.p_alt * z.p_ref).sqrt()).sum();
        let damped: f64 = nodes.iter().map(|z| (z.p_alt * z.p_ref).sqrt() * decay(z.pulls)).sum();
        steps.push(ClassicalLedgerStep {
            fidelity,
            damped,
            damped_pull_weight,
            pull_probability,
            recursion_margin: fidelity - (fid_prev - k * pull_weight),
            damped_recursion_margin: damped - (damped_prev - 2.0 * k * damped_pull_weight),
        });
        fid_prev = fidelity;
        damped_prev = damped;
        damped_pull_total += damped_pull_weight;
        squared_total += squared;
        pull_total += pull_probability;
    }

    let geometric_margin = (gap > 0.0).then(|| nodes.iter().map(|z| 1.0 / k - z.geometric).fold(f64::INFINITY, f64::min));
    let cauchy_schwarz_margin = (gap > 0.0).then(|| pull_total.sqrt() * 2.0 * (eta * (1.0 - eta)).sqrt() / gap - damped_pull_total);
    let squared_decay_margin = (gap > 0.0).then(|| squared_total - (1.0 - fid_prev) / (2.0 * k));
    Ok(ClassicalLedger {
        arm,
        gap,
        steps,
        geometric_margin,
        fidelity_over_damped: fid_prev - damped_prev,
        damped_lower_margin: damped_prev - (1.0 - 2.0 * k * damped_pull_total),
        cauchy_schwarz_margin,
        squared_decay_margin,
    })
}

fn registers(n_arms: usize, flip: Flip) -> Registers {
    match flip {
        Flip::Bit => Registers::arms_reward(n_arms),
        Flip::Phase => Registers::arms(n_arms),
    }
}

/// State index of the k-th oracle call's input in an interleaved circuit.
fn before_call(k: usize) -> usize {
    2 * k + 1
}

fn paired(
    alt: RewardVector,
    reference: RewardVector,
    unitaries: &[ComplexMatrix],
    initial: &PureState,
    flip: Flip,
) -> Result<(PairedTranscript, Registers)> {
    if unitaries.is_empty() {
        return Err(Error::Precondition("interleaved circuit needs at least one unitary".into()));
    }
    let regs = registers(reference.n_arms(), flip);
    let circuit = Circuit::interleaved(regs.dim(), unitaries);
    let run = run_paired(
        &circuit,
        &OracleModel::one_time(alt, flip, regs),
        &OracleModel::one_time(reference, flip, regs),
        &initial.density(),
    )?;
    Ok((run, regs))
}

/// One oracle call of the faulty-Grover ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityLedgerRow {
    pub call: usize,
    /// F before and after the call, against the oracle-free run.
    pub fidelity_before: f64,
    pub fidelity_after: f64,
    /// R_{t−1} − R_t of the noisy run.
    pub purity_drop: f64,
    /// ‖P_i ψ_t‖ for the oracle-free state entering the call.
    pub overlap: f64,
    /// 2‖P_i ψ_t‖ √(p/(1−p)) √(R_{t−1} − R_t) − (F_{t−1} − F_t).
    pub margin: f64,
}

/// Runs ℱ_i^p against the identity channel through U_0, O, U_1, …, O, U_T
/// and evaluates the per-call fidelity/purity ledger.
pub fn purity_ledger(
    n_arms: usize,
    target: usize,
    p: f64,
    unitaries: &[ComplexMatrix],
    initial: &PureState,
    flip: Flip,
) -> Result<Vec<PurityLedgerRow>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::BoundUndefined(p));
    }
    if target == 0 || target > n_arms {
        return Err(Error::ArmOutOfRange(target, n_arms));
    }
    let mut means = vec![0.0; n_arms];
    means[target - 1] = p;
    let (run, regs) = paired(RewardVector::new(means, 0.0)?, RewardVector::new(vec![0.0; n_arms], 0.0)?, unitaries, initial, flip)?;
    let proj = arm_projector(target, &regs)?;
    let calls = unitaries.len() - 1;
    Ok((0..calls)
        .map(|k| {
            let (i, o) = (before_call(k), before_call(k) + 1);
            let drop = run.a.records[i].purity - run.a.records[o].purity;
            let overlap = run.b.states[i].matrix().trace_product(&proj).re.max(0.0).sqrt();
            let loss = run.fidelities[i] - run.fidelities[o];
            PurityLedgerRow {
                call: k + 1,
                fidelity_before: run.fidelities[i],
                fidelity_after: run.fidelities[o],
                purity_drop: drop,
                overlap,
                margin: 2.0 * overlap * (p / (1.0 - p)).sqrt() * drop.max(0.0).sqrt() - loss,
            }
        })
        .collect())
}

/// Accumulated fidelity loss of ℰ^{p^i} against ℰ^{p^0} and the
/// distinguishability of the final pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccumulationCheck {
    /// 1 − √F(ρ_T^i, ρ_T^0)
    pub loss: f64,
    /// Σ_t 4Δ_i²/(η(1−η)) √(tr(P_iρ_t^i) tr(P_iρ_t^0)) over the oracle calls.
    pub budget: f64,
    /// budget − loss
    pub margin: f64,
    /// Helstrom failure probability δ on the final pair.
    pub helstrom_error: f64,
    /// 4δ(1−δ) − F(ρ_T^i, ρ_T^0)
    pub helstrom_margin: f64,
}

pub fn accumulation_check(
    family: &RewardFamily,
    arm: usize,
    unitaries: &[ComplexMatrix],
    initial: &PureState,
    flip: Flip,
) -> Result<AccumulationCheck> {
    let (run, regs) = paired(family.member(arm)?, family.member(0)?, unitaries, initial, flip)?;
    let proj = arm_projector(arm, &regs)?;
    let eta = family.eta();
    let scale = 4.0 * family.gap(arm).powi(2) / (eta * (1.0 - eta));
    let weight = |s: &DensityMatrix| s.matrix().trace_product(&proj).re.max(0.0);
    let budget: f64 = (0..unitaries.len() - 1)
        .map(|k| {
            let i = before_call(k);
            scale * (weight(&run.a.states[i]) * weight(&run.b.states[i])).sqrt()
        })
        .sum();
    let f_final = *run.fidelities.last().expect("paired run has the input record");
    let loss = 1.0 - f_final.max(0.0).sqrt();
    let delta = 1.0 - helstrom_success(run.a.final_state(), run.b.final_state())?;
    Ok(AccumulationCheck {
        loss,
        budget,
        margin: budget - loss,
        helstrom_error: delta,
        helstrom_margin: fidelity_ceiling(delta) - f_final,
    })
}
