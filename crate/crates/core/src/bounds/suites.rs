//! Randomised verification sweeps behind `qbandit verify`.
//!
//! Instance k of a suite draws from `rng::stream(seed, offset + k)`, where the
//! offset separates suites, so reports are reproducible for any thread count.
//! Residual checks record the negated residual as their margin.

use rand::Rng as _;
use rayon::prelude::*;

use crate::algorithms::grover_diffusion;
use crate::error::{Error, Result};
use crate::oracles::{arm_projector, make_arm_oracle, Flip, Registers, RewardFamily, RewardVector};
use crate::qmat::{helstrom_success, sqrt_fidelity, trace_distance, ComplexMatrix, DensityMatrix, PureState};
use crate::rng::{self, Rng};
use crate::simulator::measure;

use super::coupling::{build_coupling, build_coupling_perturbed};
use super::history::build_history_decomposition;
use super::ledger::{accumulation_check, classical_ledger, purity_ledger, random_policy, round_robin};
use super::lemmas::{
    bound_cos_margin, bound_sin_margin, check_fid_corollary1, check_fidelity_lemma, check_projection_lemma, purity_identity_residual,
    reward_lemma_margins, sqrt_lemma_margin,
};
use super::random;
use super::report::{CheckReport, MarginTable};

/// Suite names accepted by [`run_suite`].
pub const SUITES: [&str; 8] = ["distance", "scalar-lemmas", "fidelity-lemma", "coupling", "history", "ledger", "purity", "all"];

/// Smallest initial fidelity S for which coupling instances are kept.
pub const COUPLING_S_FLOOR: f64 = 0.1;

/// Instances per sweep when no count is given.
pub fn default_trials(suite: &str) -> usize {
    match suite {
        "scalar-lemmas" => 100_000,
        "distance" => 500,
        "history" => 20,
        "ledger" => 200,
        _ => 1000,
    }
}

type Instance = dyn Fn(&mut Rng, u64, &mut MarginTable) -> Result<()> + Sync;

fn sweep(trials: usize, seed: u64, offset: u64, f: &Instance) -> Result<MarginTable> {
    let tables: Vec<MarginTable> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut table = MarginTable::default();
            f(&mut rng::stream(seed, offset + k), k, &mut table)?;
            Ok(table)
        })
        .collect::<Result<_>>()?;
    Ok(tables.into_iter().fold(MarginTable::default(), MarginTable::merge))
}

fn registers(n_arms: usize, flip: Flip) -> Registers {
    match flip {
        Flip::Bit => Registers::arms_reward(n_arms),
        Flip::Phase => Registers::arms(n_arms),
    }
}

fn flip_for(k: u64) -> Flip {
    if k % 2 == 0 {
        Flip::Phase
    } else {
        Flip::Bit
    }
}

fn in_band(eta: f64, rng: &mut Rng) -> f64 {
    eta + (1.0 - 2.0 * eta) * rng.random::<f64>()
}

fn distance_instance(rng: &mut Rng, k: u64, t: &mut MarginTable) -> Result<()> {
    let dim = rng.random_range(2..=8);
    let rho = random::density(dim, rng);
    let sigma = random::density(dim, rng);
    let f = sqrt_fidelity(&rho, &sigma)?;

    let kraus = random::kraus_channel(dim, rng.random_range(1..=3), rng);
    let after = sqrt_fidelity(&random::apply_kraus(&kraus, &rho), &random::apply_kraus(&kraus, &sigma))?;
    t.record("distance.monotonicity", after - f, k);

    let m = rng.random_range(2..=3);
    let (wp, wq) = (random::simplex(m, rng), random::simplex(m, rng));
    let rhos: Vec<DensityMatrix> = (0..m).map(|_| random::density(dim, rng)).collect();
    let sigmas: Vec<DensityMatrix> = (0..m).map(|_| random::density(dim, rng)).collect();
    let mut split = 0.0;
    for i in 0..m {
        split += (wp[i] * wq[i]).sqrt() * sqrt_fidelity(&rhos[i], &sigmas[i])?;
    }
    let mixed = sqrt_fidelity(
        &DensityMatrix::mixture(&wp, &rhos.iter().collect::<Vec<_>>()),
        &DensityMatrix::mixture(&wq, &sigmas.iter().collect::<Vec<_>>()),
    )?;
    t.record("distance.strong-concavity", mixed - split, k);

    let u = random::unitary(dim, rng);
    t.record("distance.unitary-invariance", -(sqrt_fidelity(&rho.evolve(&u), &sigma.evolve(&u))? - f).abs(), k);

    let td = trace_distance(&rho, &sigma)?;
    t.record("distance.fuchs-lower", td - (1.0 - f), k);
    t.record("distance.fuchs-upper", (1.0 - f * f).max(0.0).sqrt() - td, k);
    t.record("distance.helstrom", -(helstrom_success(&rho, &sigma)? - 0.5 - td / 2.0).abs(), k);

    let basis: Vec<ComplexMatrix> = (0..dim)
        .map(|j| {
            let col = u.column(j);
            ComplexMatrix::outer(&col, &col)
        })
        .collect();
    let (pr, ps) = (measure(&rho, &basis)?, measure(&sigma, &basis)?);
    let tv: f64 = pr.iter().zip(&ps).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
    t.record("distance.total-variation", td - tv, k);
    Ok(())
}

fn scalar_instance(rng: &mut Rng, k: u64, t: &mut MarginTable) -> Result<()> {
    let c = rng.random_range(1e-3..0.5);
    let (p, q) = (c + (1.0 - 2.0 * c) * rng.random::<f64>(), c + (1.0 - 2.0 * c) * rng.random::<f64>());
    t.record("scalar.bound-cos", bound_cos_margin(p, q, c), k);
    t.record("scalar.bound-sin", bound_sin_margin(p, q, c), k);
    let (s, u) = loop {
        let (s, u) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if s + u >= -1.0 {
            break (s, u);
        }
    };
    t.record("scalar.sqrt", sqrt_lemma_margin(s, u), k);
    let eta = rng.random_range(0.0..0.45);
    let family = random::reward_family(rng.random_range(2..=8), eta, rng)?;
    let (lower, upper) = reward_lemma_margins(&family)?;
    t.record("scalar.reward-lower", lower, k);
    t.record("scalar.reward-upper", upper, k);
    Ok(())
}

fn fidelity_lemma_instance(rng: &mut Rng, k: u64, t: &mut MarginTable) -> Result<()> {
    let n = rng.random_range(2..=4);
    let flip = flip_for(k);
    let regs = registers(n, flip);
    let dim = regs.dim();
    let eta = rng.random_range(0.01..0.5);
    let arm = rng.random_range(1..=n);
    let rho = random::density(dim, rng);
    let sigma = random::density(dim, rng);
    let (p, q) = (in_band(eta, rng), in_band(eta, rng));
    let m = check_fidelity_lemma(&rho, &sigma, p, q, arm, eta, flip, &regs)?;
    t.record("fidelity-lemma.stated", m.stated, k);
    t.record("fidelity-lemma.sharper", m.sharper, k);

    let pv = RewardVector::new((0..n).map(|_| in_band(eta, rng)).collect(), eta)?;
    let pw = RewardVector::new((0..n).map(|_| in_band(eta, rng)).collect(), eta)?;
    let c = check_fid_corollary1(&rho, &sigma, &pv, &pw, eta, flip, &regs)?;
    t.record("corollary1.bound", c.bound, k);
    t.record("corollary1.marginal-invariance", -c.marginal_residual, k);

    let o = make_arm_oracle(arm, flip, &regs)?;
    let proj = arm_projector(arm, &regs)?;
    let phi: Vec<_> = (0..dim).map(|_| random::gaussian(rng)).collect();
    t.record("projection-lemma", check_projection_lemma(&o, &proj, &phi, &random::density(dim, rng))?, k);
    Ok(())
}

fn coupling_instance(rng: &mut Rng, k: u64, t: &mut MarginTable) -> Result<()> {
    let dim = rng.random_range(2..=8);
    let (rho, psi) = loop {
        let rho = random::density(dim, rng);
        let psi = random::pure_state(dim, rng);
        if rho.expectation(psi.amplitudes()).sqrt() >= COUPLING_S_FLOOR {
            break (rho, psi);
        }
    };
    let u = random::involution(dim, rng);
    let eta = rng.random_range(0.01..0.5);
    let p = in_band(eta, rng);
    let q = if k % 10 == 0 { p } else { in_band(eta, rng) };
    let c = build_coupling(&rho, &psi, &u, p, q, eta)?;
    t.record("coupling.mixed-residual", -c.mixed_residual, k);
    t.record("coupling.pure-residual", -c.pure_residual, k);
    t.record("coupling.angle-residual", -c.angle_residual, k);
    t.record("coupling.concavity", c.concavity_margin, k);
    t.record("coupling.bound", c.bound_margin, k);
    if p == q {
        t.record("coupling.equal-sin-alpha", -c.decomposition.sin_alpha.abs(), k);
    }

    let scale = (p - q).powi(2) / eta;
    if scale <= 0.5 {
        let sigma = (&rho.matrix().conjugate_by(&u) - rho.matrix()).scale_real(scale);
        let c = build_coupling_perturbed(&rho, &psi, &u, p, q, eta, &sigma)?;
        t.record("perturbed.concavity", c.concavity_margin, k);
        t.record("perturbed.bound", c.bound_margin, k);
    }
    Ok(())
}

/// Family used by the history suite: p₀ = 0.6, steps of 0.1, η = 0.3.
pub fn history_family(n_arms: usize) -> Result<RewardFamily> {
    let mut base = vec![0.6, 0.5, 0.4];
    base.resize(n_arms + 1, 0.4);
    RewardFamily::new(base, 0.3)
}

/// (N, T) cells swept by the history suite.
pub const HISTORY_CELLS: [(usize, usize); 6] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)];

fn history_instance(rng: &mut Rng, k: u64, t: &mut MarginTable) -> Result<()> {
    let (n, horizon) = HISTORY_CELLS[k as usize % HISTORY_CELLS.len()];
    let flip = flip_for(k / HISTORY_CELLS.len() as u64);
    let family = history_family(n)?;
    let dim = registers(n, flip).dim();
    let unitaries: Vec<ComplexMatrix> = (0..horizon).map(|_| random::unitary(dim, rng)).collect();
    let initial = random::pure_state(dim, rng);
    let arm = rng.random_range(1..=n);
    let h = build_history_decomposition(&family, arm, &unitaries, &initial, flip)?;
    for s in &h.steps {
        t.record("history.p-sum", -s.p_sum_residual, k);
        t.record("history.q-sum", -s.q_sum_residual, k);
        t.record("history.nonnegative", s.min_weight, k);
        t.record("history.mixed-reconstruction", -s.mixed_residual, k);
        t.record("history.pure-reconstruction", -s.pure_residual, k);
    }
    for b in &h.purity {
        t.record("history.purity-identity", -b.identity_residual, k);
        t.record("history.purity-stated", b.stated_margin, k);
        t.record("history.purity-relaxed", b.relaxed_margin, k);
    }
    Ok(())
}

fn ledger_instance(rng: &mut Rng, k: u64, t: &mut MarginTable) -> Result<()> {
    let n = rng.random_range(2..=3);
    let horizon = rng.random_range(1..=8);
    // η ≥ 0.15 keeps every in-band gap below 2√(η(1−η)), so decay factors stay in (0, 1].
    let eta = rng.random_range(0.15..0.45);
    let family = random::reward_family(n, eta, rng)?;
    let arm = rng.random_range(1..=n);
    let ledger = if k % 2 == 0 {
        classical_ledger(&family, arm, &round_robin(n), horizon)?
    } else {
        classical_ledger(&family, arm, &random_policy(n, rng.random()), horizon)?
    };
    for s in &ledger.steps {
        t.record("classical.recursion", s.recursion_margin, k);
        t.record("classical.damped-recursion", s.damped_recursion_margin, k);
    }
    if let Some(m) = ledger.geometric_margin {
        t.record("classical.geometric-sum", m, k);
    }
    t.record("classical.fidelity-over-damped", ledger.fidelity_over_damped, k);
    t.record("classical.damped-lower", ledger.damped_lower_margin, k);
    if let Some(m) = ledger.cauchy_schwarz_margin {
        t.record("classical.cauchy-schwarz", m, k);
    }

    let n = rng.random_range(2..=4);
    let flip = flip_for(k);
    let family = random::reward_family(n, eta, rng)?;
    let dim = registers(n, flip).dim();
    let unitaries: Vec<ComplexMatrix> = (0..rng.random_range(2..=6)).map(|_| random::unitary(dim, rng)).collect();
    let acc = accumulation_check(&family, rng.random_range(1..=n), &unitaries, &random::pure_state(dim, rng), flip)?;
    t.record("accumulation", acc.margin, k);
    t.record("helstrom-consistency", acc.helstrom_margin, k);
    Ok(())
}

fn purity_instance(rng: &mut Rng, k: u64, t: &mut MarginTable) -> Result<()> {
    let n = rng.random_range(2..=8);
    let flip = flip_for(k);
    let regs = registers(n, flip);
    let rho = random::density(regs.dim(), rng);
    let oracle = make_arm_oracle(rng.random_range(1..=n), flip, &regs)?;
    t.record("purity.identity", -purity_identity_residual(&rho, rng.random::<f64>(), &oracle), k);

    if k % 10 == 0 {
        // Grover-style runs on the arm register: uniform start, diffusion
        // steps, or Haar-random steps on every other run.
        let calls = rng.random_range(1..=10);
        let target = rng.random_range(1..=n);
        let p = rng.random_range(0.01..0.99);
        let grover = k % 20 == 0;
        let unitaries: Vec<ComplexMatrix> = (0..=calls)
            .map(|s| match (grover, s) {
                (true, 0) => ComplexMatrix::identity(n),
                (true, _) => grover_diffusion(n),
                (false, _) => random::unitary(n, rng),
            })
            .collect();
        let initial = if grover { PureState::uniform(n) } else { random::pure_state(n, rng) };
        for row in purity_ledger(n, target, p, &unitaries, &initial, Flip::Phase)? {
            t.record("purity.ledger", row.margin, k);
            t.record("purity.monotone", row.purity_drop, k);
        }
    }
    Ok(())
}

fn suite_parts(name: &str) -> Option<Vec<(&'static str, u64, &'static Instance)>> {
    let all: [(&'static str, u64, &'static Instance); 7] = [
        ("distance", 1, &distance_instance),
        ("scalar-lemmas", 2, &scalar_instance),
        ("fidelity-lemma", 3, &fidelity_lemma_instance),
        ("coupling", 4, &coupling_instance),
        ("history", 5, &history_instance),
        ("ledger", 6, &ledger_instance),
        ("purity", 7, &purity_instance),
    ];
    match name {
        "all" => Some(all.to_vec()),
        _ => all.iter().find(|(n, _, _)| *n == name).map(|&p| vec![p]),
    }
}

/// Instance count of one suite: the history suite sweeps `trials`
/// sequences in every (N, T) cell.
fn instance_count(suite: &str, trials: usize) -> usize {
    if suite == "history" {
        trials * HISTORY_CELLS.len()
    } else {
        trials
    }
}

/// Runs a named suite. `trials` overrides each part's default instance
/// count; a report passes when its minimum margin is at least `-tol`.
pub fn run_suite(name: &str, trials: Option<usize>, seed: u64, tol: f64) -> Result<Vec<CheckReport>> {
    let parts = suite_parts(name).ok_or_else(|| Error::Precondition(format!("unknown suite '{name}'; expected one of {}", SUITES.join(", "))))?;
    let mut reports = Vec::new();
    for (suite, index, f) in parts {
        let count = instance_count(suite, trials.unwrap_or_else(|| default_trials(suite)));
        reports.extend(sweep(count, seed, index << 40, f)?.reports(tol));
    }
    Ok(reports)
}
