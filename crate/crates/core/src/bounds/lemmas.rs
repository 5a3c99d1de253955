use crate::error::{Error, Result};
use crate::oracles::{arm_projector, make_channel_e, make_channel_f, Flip, RewardFamily, Registers, RewardVector};
use crate::qmat::{purity, sqrt_fidelity, vec_norm, ComplexMatrix, DensityMatrix, C64};

use super::complexity::complexity_h;

/// Largest violation of (Id − P)O = Id − P accepted by the projection check.
const PROJECTOR_TOL: f64 = 1e-10;

fn quadratic_form(m: &ComplexMatrix, phi: &[C64]) -> C64 {
    phi.iter().zip(&m.mul_vec(phi)).map(|(a, b)| a.conj() * b).sum()
}

/// tr(M²) for Hermitian M.
fn hs_square(m: &ComplexMatrix) -> f64 {
    m.trace_product(m).re
}

fn check_band(p: f64, eta: f64) -> Result<()> {
    if !(eta > 0.0) || p < eta || p > 1.0 - eta {
        return Err(Error::EtaBand(p, eta));
    }
    Ok(())
}

/// Margin of |⟨φ|(OσO† − σ)|φ⟩| ≤ 2‖Pφ‖‖φ‖ (tr(OσO† − σ)²)^{1/2}.
pub fn check_projection_lemma(o: &ComplexMatrix, p: &ComplexMatrix, phi: &[C64], sigma: &DensityMatrix) -> Result<f64> {
    let n = o.rows();
    let complement = &ComplexMatrix::identity(n) - p;
    let residual = (&complement.matmul(o) - &complement).max_abs();
    if residual > PROJECTOR_TOL {
        return Err(Error::ProjectorIncompatible(residual));
    }
    let diff = &sigma.matrix().conjugate_by(o) - sigma.matrix();
    let lhs = quadratic_form(&diff, phi).norm();
    let rhs = 2.0 * vec_norm(&p.mul_vec(phi)) * vec_norm(phi) * hs_square(&diff).max(0.0).sqrt();
    Ok(rhs - lhs)
}

/// √((1−p)(1−q)) + √(pq) ≥ 1 − (p−q)²/(4c(1−c)) for p, q ∈ [c, 1−c].
pub fn bound_cos_margin(p: f64, q: f64, c: f64) -> f64 {
    ((1.0 - p) * (1.0 - q)).sqrt() + (p * q).sqrt() - (1.0 - (p - q).powi(2) / (4.0 * c * (1.0 - c)))
}

/// |√((1−p)q) − √((1−q)p)| ≤ |p−q|/(2√(c(1−c))) for p, q ∈ [c, 1−c].
pub fn bound_sin_margin(p: f64, q: f64, c: f64) -> f64 {
    (p - q).abs() / (2.0 * (c * (1.0 - c)).sqrt()) - (((1.0 - p) * q).sqrt() - ((1.0 - q) * p).sqrt()).abs()
}

/// √(1+s+t) ≥ 1 − |s| + t/2 − t²/2 for s + t ≥ −1.
pub fn sqrt_lemma_margin(s: f64, t: f64) -> f64 {
    (1.0 + s + t).max(0.0).sqrt() - (1.0 - s.abs() + t / 2.0 - t * t / 2.0)
}

/// Worst margins of H(p⁰)/4 ≤ H(p^j) ≤ 2H(p⁰) over the members j ≥ 1,
/// divided by H(p⁰): (lower, upper).
pub fn reward_lemma_margins(family: &RewardFamily) -> Result<(f64, f64)> {
    let h0 = complexity_h(&family.member(0)?)?;
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    for j in 1..=family.n_arms() {
        let hj = complexity_h(&family.member(j)?)?;
        lower = lower.min((hj - h0 / 4.0) / h0);
        upper = upper.min((2.0 * h0 - hj) / h0);
    }
    Ok((lower, upper))
}

/// Margins of the single-arm fidelity bound with the stated constant
/// 1/(η(1−η)) and with the sharper 1/(2η(1−η)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityLemmaMargins {
    pub stated: f64,
    pub sharper: f64,
}

/// √F(ℱ_i^p ρ, ℱ_i^q σ) ≥ √F(ρ,σ) − (p−q)²/(η(1−η)) · √(tr(P_iρ) tr(P_iσ)).
#[allow(clippy::too_many_arguments)]
pub fn check_fidelity_lemma(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    p: f64,
    q: f64,
    arm: usize,
    eta: f64,
    flip: Flip,
    regs: &Registers,
) -> Result<FidelityLemmaMargins> {
    check_band(p, eta)?;
    check_band(q, eta)?;
    let fp = make_channel_f(arm, p, flip, regs)?;
    let fq = make_channel_f(arm, q, flip, regs)?;
    let after = sqrt_fidelity(&fp.apply(rho), &fq.apply(sigma))?;
    let before = sqrt_fidelity(rho, sigma)?;
    let proj = arm_projector(arm, regs)?;
    let weight = (rho.matrix().trace_product(&proj).re.max(0.0) * sigma.matrix().trace_product(&proj).re.max(0.0)).sqrt();
    let loss = (p - q).powi(2) / (eta * (1.0 - eta)) * weight;
    Ok(FidelityLemmaMargins { stated: after - (before - loss), sharper: after - (before - loss / 2.0) })
}

/// Margin of the all-arm bound and the largest violation of
/// tr(P_i ℱ_j ρ) = tr(P_i ρ) for i ≠ j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corollary1Margins {
    pub bound: f64,
    pub marginal_residual: f64,
}

/// √F(ℰ^p ρ, ℰ^{p′} σ) ≥ √F(ρ,σ) − Σ_i (p_i − p′_i)²/(2η(1−η)) · √(tr(P_iρ) tr(P_iσ)).
pub fn check_fid_corollary1(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    p: &RewardVector,
    p_prime: &RewardVector,
    eta: f64,
    flip: Flip,
    regs: &Registers,
) -> Result<Corollary1Margins> {
    if p.n_arms() != p_prime.n_arms() || p.n_arms() != regs.n_arms {
        return Err(Error::Precondition("reward vectors and registers disagree on the arm count".into()));
    }
    for (&a, &b) in p.means().iter().zip(p_prime.means()) {
        check_band(a, eta)?;
        check_band(b, eta)?;
    }
    let after = sqrt_fidelity(&make_channel_e(p, flip, regs)?.apply(rho), &make_channel_e(p_prime, flip, regs)?.apply(sigma))?;
    let before = sqrt_fidelity(rho, sigma)?;
    let mut loss = 0.0;
    let mut marginal_residual: f64 = 0.0;
    for i in 1..=regs.n_arms {
        let proj = arm_projector(i, regs)?;
        let wr = rho.matrix().trace_product(&proj).re;
        let ws = sigma.matrix().trace_product(&proj).re;
        let d = p.mean(i) - p_prime.mean(i);
        loss += d * d / (2.0 * eta * (1.0 - eta)) * (wr.max(0.0) * ws.max(0.0)).sqrt();
        for j in (1..=regs.n_arms).filter(|&j| j != i) {
            let moved = make_channel_f(j, p.mean(j), flip, regs)?.apply(rho);
            marginal_residual = marginal_residual.max((moved.matrix().trace_product(&proj).re - wr).abs());
        }
    }
    Ok(Corollary1Margins { bound: after - (before - loss), marginal_residual })
}

/// |R(ρ) − R(ℱρ) − p(1−p) tr(ρ − OρO†)²| for ℱρ = (1−p)ρ + p OρO†.
pub fn purity_identity_residual(rho: &DensityMatrix, p: f64, oracle: &ComplexMatrix) -> f64 {
    let rotated = rho.matrix().conjugate_by(oracle);
    let mut out = rho.matrix().scale_real(1.0 - p);
    out.add_scaled(&rotated, p);
    let after = DensityMatrix::from_matrix_unchecked(out);
    let diff = rho.matrix() - &rotated;
    (purity(rho) - purity(&after) - p * (1.0 - p) * hs_square(&diff)).abs()
}
