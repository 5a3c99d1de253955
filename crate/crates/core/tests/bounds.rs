use proptest::prelude::*;
use qbandit::bounds::random;
use qbandit::bounds::*;
use qbandit::oracles::*;
use qbandit::qmat::*;
use qbandit::rng;
use qbandit::Error;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn complexity_examples() {
    let p = RewardVector::new(vec![0.9, 0.5], 0.0).unwrap();
    assert!((complexity_h(&p).unwrap() - 6.25).abs() < 1e-12);
    let p = RewardVector::prototypical(5, 0.4, 0.2).unwrap();
    assert!((complexity_h(&p).unwrap() - 4.0 / 0.04).abs() < 1e-9);
    let sorted = RewardVector::new(vec![0.8, 0.6, 0.3], 0.0).unwrap();
    let shuffled = RewardVector::new(vec![0.3, 0.8, 0.6], 0.0).unwrap();
    assert_eq!(complexity_h(&sorted).unwrap(), complexity_h(&shuffled).unwrap());
    let tied = RewardVector::new(vec![0.7, 0.7, 0.2], 0.0).unwrap();
    assert_eq!(complexity_h(&tied), Err(Error::BestArmNotUnique));
}

#[test]
fn grover_lower_bound_examples() {
    assert!((grover_lower_bound(100, 0.5, 0.0).unwrap() - 100.0).abs() < 1e-12);
    assert_eq!(grover_lower_bound(100, 0.5, 0.5).unwrap(), 0.0);
    let n = 400usize;
    let p = 1.0 - 1.0 / (n as f64).sqrt();
    let expected = (n as f64).sqrt() / (1.0 - 1.0 / (n as f64).sqrt());
    assert!((grover_lower_bound(n, p, 0.0).unwrap() - expected).abs() < 1e-9);
    assert_eq!(grover_lower_bound(16, 0.0, 0.1), Err(Error::BoundUndefined(0.0)));
    assert_eq!(grover_lower_bound(16, 1.0, 0.1), Err(Error::BoundUndefined(1.0)));
    assert!(matches!(grover_lower_bound(16, 0.5, 0.7), Err(Error::Precondition(_))));
}

#[test]
fn optimal_constant_examples() {
    assert!(optimal_constant(0.5, 0.3).abs() < 1e-15);
    assert!((optimal_constant(0.0, 1.0) - 0.0025).abs() < 1e-15);
    let grid: Vec<f64> = (0..50).map(|k| optimal_constant(k as f64 / 100.0, 0.25)).collect();
    assert!(grid.windows(2).all(|w| w[1] < w[0]));
    assert!((fidelity_ceiling(0.25) - 0.75).abs() < 1e-15);
}

#[test]
fn projection_lemma_examples() {
    let mut r = rng::seeded(1);
    let sigma = random::density(4, &mut r);
    let phi = random::pure_state(4, &mut r);
    let id = ComplexMatrix::identity(4);
    assert_eq!(check_projection_lemma(&id, &id, phi.amplitudes(), &sigma).unwrap(), 0.0);
    for _ in 0..50 {
        let o = random::unitary(4, &mut r);
        let v: Vec<C64> = (0..4).map(|_| random::gaussian(&mut r)).collect();
        assert!(check_projection_lemma(&o, &id, &v, &random::density(4, &mut r)).unwrap() >= -1e-12);
    }
    let zero = ComplexMatrix::zeros(4, 4);
    let o = random::unitary(4, &mut r);
    assert!(matches!(check_projection_lemma(&o, &zero, phi.amplitudes(), &sigma), Err(Error::ProjectorIncompatible(_))));
}

#[test]
fn scalar_lemma_edges() {
    assert_eq!(bound_cos_margin(0.3, 0.3, 0.2), 0.0);
    assert_eq!(sqrt_lemma_margin(0.0, 0.0), 0.0);
    // s = t = −1/2 lies in the admissible region s + t ≥ −1 but gives
    // √0 = 0 against 1 − 1/2 − 1/4 − 1/8 = 1/8.
    assert!((sqrt_lemma_margin(-0.5, -0.5) + 0.125).abs() < 1e-15);
    // With s ≥ 0 the bound does hold.
    assert!(sqrt_lemma_margin(0.3, -0.9) >= 0.0);
}

proptest! {
    #[test]
    fn bound_cos_and_sin_hold(c in 1e-3f64..0.5, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let (p, q) = (c + (1.0 - 2.0 * c) * u, c + (1.0 - 2.0 * c) * v);
        prop_assert!(bound_cos_margin(p, q, c) >= -1e-12);
        prop_assert!(bound_sin_margin(p, q, c) >= -1e-12);
    }

    #[test]
    fn sqrt_lemma_holds_for_nonnegative_s(s in 0.0f64..3.0, t in -1.0f64..3.0) {
        prop_assert!(sqrt_lemma_margin(s, t) >= -1e-12);
    }

    #[test]
    fn coupling_angle_is_a_rotation(p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let (cos_a, sin_a) = coupling_angle(p, q);
        prop_assert!((cos_a * cos_a + sin_a * sin_a - 1.0).abs() < 1e-12);
        // cos α is the Bhattacharyya overlap of Ber(p) and Ber(q).
        let overlap = (p * q).sqrt() + ((1.0 - p) * (1.0 - q)).sqrt();
        prop_assert_eq!(cos_a, overlap);
    }
}

#[test]
fn reward_lemma_examples() {
    let family = RewardFamily::new(vec![0.7, 0.6, 0.5, 0.5, 0.4], 0.1).unwrap();
    let (lower, upper) = reward_lemma_margins(&family).unwrap();
    assert!(lower >= -1e-12 && upper >= -1e-12);
    let mut r = rng::seeded(3);
    for _ in 0..200 {
        let f = random::reward_family(6, 0.05, &mut r).unwrap();
        let (lower, upper) = reward_lemma_margins(&f).unwrap();
        assert!(lower >= -1e-12 && upper >= -1e-12);
    }
}

#[test]
fn fidelity_lemma_examples() {
    let mut r = rng::seeded(4);
    for flip in [Flip::Phase, Flip::Bit] {
        let regs = if flip == Flip::Bit { Registers::arms_reward(3) } else { Registers::arms(3) };
        let rho = random::density(regs.dim(), &mut r);
        let sigma = random::density(regs.dim(), &mut r);
        let m = check_fidelity_lemma(&rho, &sigma, 0.4, 0.4, 2, 0.2, flip, &regs).unwrap();
        assert!(m.stated >= -1e-9 && m.sharper >= -1e-9);
    }

    // Pure state supported on arm 1 only: arm 2's channel cannot touch it.
    let regs = Registers::arms_reward(2);
    let mut amps = vec![C64::new(0.0, 0.0); regs.dim()];
    amps[regs.index(1, 0, 0, 0)] = c(0.6);
    amps[regs.index(1, 0, 1, 0)] = C64::new(0.0, 0.8);
    let rho = PureState::new(amps).unwrap().density();
    let m = check_fidelity_lemma(&rho, &rho, 0.3, 0.7, 2, 0.2, Flip::Bit, &regs).unwrap();
    assert!(m.stated.abs() < 1e-12);

    assert!(matches!(check_fidelity_lemma(&rho, &rho, 0.1, 0.5, 1, 0.2, Flip::Bit, &regs), Err(Error::EtaBand(_, _))));
}

#[test]
fn corollary_reduces_to_single_arm_lemma() {
    let mut r = rng::seeded(5);
    let regs = Registers::arms(3);
    let rho = random::density(3, &mut r);
    let sigma = random::density(3, &mut r);
    let p = RewardVector::new(vec![0.3, 0.5, 0.6], 0.2).unwrap();
    let same = check_fid_corollary1(&rho, &sigma, &p, &p, 0.2, Flip::Phase, &regs).unwrap();
    assert!(same.bound >= -1e-9);
    assert!(same.marginal_residual <= 1e-12);

    let q = RewardVector::new(vec![0.3, 0.7, 0.6], 0.2).unwrap();
    let cor = check_fid_corollary1(&rho, &sigma, &p, &q, 0.2, Flip::Phase, &regs).unwrap();
    // Other arms act identically on both sides, so only arm 2 matters and
    // the corollary's constant is the lemma's sharper one.
    let single = check_fidelity_lemma(
        &make_channel_f(1, 0.3, Flip::Phase, &regs).unwrap().apply(&rho),
        &make_channel_f(1, 0.3, Flip::Phase, &regs).unwrap().apply(&sigma),
        0.5,
        0.7,
        2,
        0.2,
        Flip::Phase,
        &regs,
    )
    .unwrap();
    assert!(cor.bound >= -1e-9 && single.sharper >= -1e-9);
}

#[test]
fn purity_identity_examples() {
    let mut r = rng::seeded(6);
    let regs = Registers::arms_reward(4);
    for arm in 1..=4 {
        let rho = random::density(regs.dim(), &mut r);
        let o = make_arm_oracle(arm, Flip::Bit, &regs).unwrap();
        assert!(purity_identity_residual(&rho, 0.37, &o) <= 1e-12);
    }
}

fn coupling_instance(seed: u64, dim: usize) -> (DensityMatrix, PureState, ComplexMatrix) {
    let mut r = rng::seeded(seed);
    loop {
        let rho = random::density(dim, &mut r);
        let psi = random::pure_state(dim, &mut r);
        if rho.expectation(psi.amplitudes()).sqrt() >= 0.1 {
            return (rho, psi, random::involution(dim, &mut r));
        }
    }
}

#[test]
fn coupling_equal_probabilities() {
    let (rho, psi, u) = coupling_instance(7, 5);
    let check = build_coupling(&rho, &psi, &u, 0.35, 0.35, 0.2).unwrap();
    let d = &check.decomposition;
    assert_eq!(d.sin_alpha, 0.0);
    assert!((d.q_prime - 0.35).abs() < 1e-12);
    let u_psi = u.mul_vec(psi.amplitudes());
    let overlap = inner(d.psi1.amplitudes(), &u_psi).norm();
    assert!((overlap - 1.0).abs() < 1e-12);
    assert!(check.mixed_residual <= 1e-11 && check.pure_residual <= 1e-11);
    assert!(check.bound_margin >= -1e-9 && check.concavity_margin >= -1e-9);
}

#[test]
fn coupling_identity_unitary() {
    let (rho, psi, _) = coupling_instance(8, 4);
    let id = ComplexMatrix::identity(4);
    let check = build_coupling(&rho, &psi, &id, 0.3, 0.6, 0.25).unwrap();
    let s = check.decomposition.s;
    assert!((check.fidelity - s).abs() < 1e-10);
    // All correction terms vanish, so the bound is S itself.
    assert!((check.split - s - check.bound_margin).abs() < 1e-12);
}

#[test]
fn coupling_random_sweep() {
    for seed in 0..200 {
        let (rho, psi, u) = coupling_instance(100 + seed, 2 + seed as usize % 7);
        let check = build_coupling(&rho, &psi, &u, 0.2 + 0.003 * seed as f64, 0.7 - 0.002 * seed as f64, 0.15).unwrap();
        assert!(check.mixed_residual <= 1e-11 && check.pure_residual <= 1e-11, "seed {seed}");
        assert!(check.angle_residual <= 1e-12);
        assert!(check.bound_margin >= -1e-9, "seed {seed}: {}", check.bound_margin);
    }
}

#[test]
fn coupling_preconditions() {
    let (rho, psi, u) = coupling_instance(9, 3);
    assert!(matches!(build_coupling(&rho, &psi, &u, 0.5, 0.5, 0.6), Err(Error::Precondition(_))));
    assert!(matches!(build_coupling(&rho, &psi, &u, 0.1, 0.5, 0.2), Err(Error::EtaBand(_, _))));
    let mut r = rng::seeded(9);
    let not_involution = random::unitary(3, &mut r);
    assert!(matches!(build_coupling(&rho, &psi, &not_involution, 0.4, 0.5, 0.2), Err(Error::Precondition(_))));
    let pure = PureState::basis(3, 0);
    let orthogonal = PureState::basis(3, 1);
    assert!(matches!(
        build_coupling(&pure.density(), &orthogonal, &ComplexMatrix::identity(3), 0.4, 0.5, 0.2),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn perturbed_coupling_examples() {
    let (rho, psi, u) = coupling_instance(10, 4);
    let plain = build_coupling(&rho, &psi, &u, 0.4, 0.55, 0.2).unwrap();
    let zero = build_coupling_perturbed(&rho, &psi, &u, 0.4, 0.55, 0.2, &ComplexMatrix::zeros(4, 4)).unwrap();
    assert_eq!(plain.bound_margin, zero.bound_margin);

    let direction = &rho.matrix().conjugate_by(&u) - rho.matrix();
    let scale = 0.15f64.powi(2) / 0.2;
    let c = build_coupling_perturbed(&rho, &psi, &u, 0.4, 0.55, 0.2, &direction.scale_real(scale)).unwrap();
    assert!(c.mixed_residual <= 1e-11 && c.bound_margin >= -1e-9);

    let mut s = scale;
    let err = loop {
        s *= 2.0;
        if let Err(e) = build_coupling_perturbed(&rho, &psi, &u, 0.4, 0.55, 0.2, &direction.scale_real(s)) {
            break e;
        }
        assert!(s < 1e6);
    };
    assert!(matches!(err, Error::PerturbationTooLarge(_)));
}

#[test]
fn history_horizon_zero() {
    let family = RewardFamily::new(vec![0.6, 0.5, 0.4], 0.3).unwrap();
    let psi = random::pure_state(4, &mut rng::seeded(11));
    let h = build_history_decomposition(&family, 1, &[], &psi, Flip::Bit).unwrap();
    assert_eq!(h.branches.len(), 1);
    let d = psi.density();
    assert!((h.mixed_state().matrix() - d.matrix()).max_abs() < 1e-15);
    assert!((h.pure_mixture().matrix() - d.matrix()).max_abs() < 1e-15);
}

#[test]
fn history_two_arms_two_steps() {
    let family = RewardFamily::new(vec![0.6, 0.5, 0.4], 0.3).unwrap();
    let mut r = rng::seeded(12);
    for flip in [Flip::Bit, Flip::Phase] {
        let dim = if flip == Flip::Bit { 4 } else { 2 };
        let us: Vec<ComplexMatrix> = (0..2).map(|_| random::unitary(dim, &mut r)).collect();
        let psi = random::pure_state(dim, &mut r);
        for arm in 1..=2 {
            let h = build_history_decomposition(&family, arm, &us, &psi, flip).unwrap();
            assert_eq!(h.branches.len(), 16);
            for s in &h.steps {
                assert!(s.p_sum_residual <= 1e-10 && s.q_sum_residual <= 1e-10);
                assert!(s.min_weight >= -1e-12);
                assert!(s.mixed_residual <= 1e-9 && s.pure_residual <= 1e-9);
            }
            for b in &h.purity {
                assert!(b.identity_residual <= 1e-12);
                assert!(b.relaxed_margin >= -1e-9);
            }
            // P^i is the product of Bernoulli laws of p^i along each history.
            let member = family.member(arm).unwrap();
            for b in &h.branches {
                let expected: f64 = b
                    .history
                    .iter()
                    .flat_map(|x| x.iter().enumerate().map(|(k, &bit)| if bit { member.means()[k] } else { 1.0 - member.means()[k] }))
                    .product();
                assert!((b.p_weight - expected).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn history_stated_purity_relation_fails_on_reference_family() {
    // p₀ = 0.6, η = 0.3 gives a₀ = 2Δ², so a₀(1 − a₀) < 2Δ² and the
    // stated constant cannot hold wherever the spread is nonzero.
    let family = RewardFamily::new(vec![0.6, 0.5, 0.4], 0.3).unwrap();
    let mut r = rng::seeded(13);
    let us = vec![random::unitary(4, &mut r)];
    let h = build_history_decomposition(&family, 1, &us, &random::pure_state(4, &mut r), Flip::Bit).unwrap();
    let branch0 = h.purity.iter().find(|b| !b.branch).unwrap();
    assert!(branch0.spread > 1e-6);
    assert!(branch0.stated_margin < 0.0);
}

#[test]
fn history_caps_and_preconditions() {
    let family4 = RewardFamily::new(vec![0.6, 0.5, 0.4, 0.4, 0.4], 0.3).unwrap();
    let psi = PureState::uniform(8);
    assert!(matches!(build_history_decomposition(&family4, 1, &[], &psi, Flip::Bit), Err(Error::HistoryCap(_))));
    let family = RewardFamily::new(vec![0.6, 0.5, 0.4], 0.3).unwrap();
    let us = vec![ComplexMatrix::identity(4); 5];
    assert!(matches!(build_history_decomposition(&family, 1, &us, &PureState::uniform(4), Flip::Bit), Err(Error::HistoryCap(_))));
    let wide = RewardFamily::new(vec![0.9, 0.5, 0.1], 0.1).unwrap();
    assert!(matches!(build_history_decomposition(&wide, 1, &[], &PureState::uniform(4), Flip::Bit), Err(Error::Precondition(_))));
}

#[test]
fn classical_ledger_never_pulling_the_arm() {
    let family = RewardFamily::new(vec![0.6, 0.5, 0.4], 0.3).unwrap();
    let ledger = classical_ledger(&family, 2, &|_: &[(usize, bool)]| 1, 6).unwrap();
    assert!(ledger.steps.iter().all(|s| (s.fidelity - 1.0).abs() < 1e-12));
}

#[test]
fn classical_ledger_round_robin() {
    let family = RewardFamily::new(vec![0.6, 0.5, 0.4], 0.3).unwrap();
    for arm in 1..=2 {
        let ledger = classical_ledger(&family, arm, &round_robin(2), 6).unwrap();
        assert!(ledger.min_margin() >= -1e-10);
        // Round robin pulls arm j exactly three times in six steps, so the
        // transcript fidelity is the Bernoulli overlap cubed.
        let member = family.member(arm).unwrap();
        let (p, q) = (member.mean(arm), family.member(0).unwrap().mean(arm));
        let overlap = (p * q).sqrt() + ((1.0 - p) * (1.0 - q)).sqrt();
        assert!((ledger.steps[5].fidelity - overlap.powi(3)).abs() < 1e-12);
    }
}

#[test]
fn classical_ledger_random_policies() {
    let mut r = rng::seeded(14);
    for seed in 0..20 {
        let family = random::reward_family(3, 0.2, &mut r).unwrap();
        let ledger = classical_ledger(&family, 1 + seed as usize % 3, &random_policy(3, seed), 8).unwrap();
        assert!(ledger.min_margin() >= -1e-10, "seed {seed}: {}", ledger.min_margin());
    }
}

#[test]
fn classical_ledger_zero_gap_and_caps() {
    let p = RewardVector::new(vec![0.5, 0.4], 0.2).unwrap();
    let ledger = classical_ledger_pair(&p, &p, 1, &round_robin(2), 4).unwrap();
    assert_eq!(ledger.geometric_margin, None);
    assert_eq!(ledger.cauchy_schwarz_margin, None);
    assert!(ledger.steps.iter().all(|s| s.damped == s.fidelity));

    let family = RewardFamily::new(vec![0.6, 0.5, 0.4], 0.3).unwrap();
    assert!(matches!(classical_ledger(&family, 1, &round_robin(2), 17), Err(Error::HistoryCap(_))));
    let five = RewardFamily::new(vec![0.6, 0.5, 0.4, 0.4, 0.4, 0.4], 0.3).unwrap();
    assert!(matches!(classical_ledger(&five, 1, &round_robin(5), 3), Err(Error::HistoryCap(_))));
    let steep = RewardFamily::new(vec![0.95, 0.5, 0.05], 0.05).unwrap();
    assert!(matches!(classical_ledger(&steep, 2, &round_robin(2), 3), Err(Error::Precondition(_))));
}

#[test]
fn faulty_grover_purity_ledger() {
    use qbandit::algorithms::grover_diffusion;
    let n = 8;
    let mut us = vec![ComplexMatrix::identity(n)];
    us.extend(std::iter::repeat_n(grover_diffusion(n), 10));
    for p in [0.1, 0.5, 0.9] {
        let rows = purity_ledger(n, 3, p, &us, &PureState::uniform(n), Flip::Phase).unwrap();
        assert_eq!(rows.len(), 10);
        for row in rows {
            assert!(row.margin >= -1e-9, "p {p} call {}: {}", row.call, row.margin);
            assert!(row.purity_drop >= -1e-12);
        }
    }
    assert_eq!(purity_ledger(4, 1, 1.0, &us[..2], &PureState::uniform(4), Flip::Phase), Err(Error::BoundUndefined(1.0)));
}

#[test]
fn accumulation_and_helstrom() {
    let mut r = rng::seeded(15);
    let family = RewardFamily::new(vec![0.6, 0.5, 0.4, 0.35], 0.2).unwrap();
    for flip in [Flip::Phase, Flip::Bit] {
        let dim = if flip == Flip::Bit { 6 } else { 3 };
        let us: Vec<ComplexMatrix> = (0..5).map(|_| random::unitary(dim, &mut r)).collect();
        for arm in 1..=3 {
            let a = accumulation_check(&family, arm, &us, &random::pure_state(dim, &mut r), flip).unwrap();
            assert!(a.margin >= -1e-9 && a.helstrom_margin >= -1e-9);
        }
    }
}

#[test]
fn margin_tracker_semantics() {
    let mut t = MarginTracker::default();
    assert!(!t.report("x", 1e-9).pass);
    t.record(0.5, 3);
    t.record(-2e-10, 7);
    let r = t.report("x", 1e-9);
    assert!(r.pass && r.worst_seed == 7 && r.instances == 2);
    assert!(!t.report("x", 0.0).pass);
    t.record(f64::NAN, 9);
    assert_eq!(t.min_margin, f64::NEG_INFINITY);
    let json = reports_to_json(&[t.report("x", 1e-9)]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let obj = v[0].as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
    keys.sort();
    assert_eq!(keys, ["check", "instances", "min_margin", "pass", "worst_seed"]);
}

#[test]
fn suites_are_deterministic_and_named() {
    assert!(run_suite("nosuch", Some(1), 0, 1e-9).is_err());
    let a = run_suite("coupling", Some(40), 7, 1e-9).unwrap();
    let b = run_suite("coupling", Some(40), 7, 1e-9).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.pass));
    let all = run_suite("all", Some(10), 1, 1e-9).unwrap();
    for suite in &SUITES[..7] {
        let part = run_suite(suite, Some(10), 1, 1e-9).unwrap();
        assert!(part.iter().all(|r| all.contains(r)), "{suite}");
    }
}
