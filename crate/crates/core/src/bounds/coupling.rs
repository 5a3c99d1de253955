use crate::error::{Error, Result};
use crate::qmat::{half_trace_norm, hermitian_eig, sqrt_fidelity, vec_norm, ComplexMatrix, DensityMatrix, PureState, C64};

/// Largest deviation from U = U† = U⁻¹ accepted for the coupling unitary.
const INVOLUTION_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a perturbed branch state.
const PSD_TOL: f64 = 1e-12;
/// Below this norm a split vector is treated as absent.
const NULL_BRANCH: f64 = 1e-300;

/// Split of one oracle application into two branches for a mixed state ρ
/// (weights 1−p, p) and a pure state ψ (weights 1−q′, q′).
#[derive(Debug, Clone)]
pub struct CouplingDecomposition {
    pub p: f64,
    pub q: f64,
    pub cos_alpha: f64,
    pub sin_alpha: f64,
    pub rho0: DensityMatrix,
    pub rho1: DensityMatrix,
    /// Unnormalised branch vectors; ‖ψ̄₀‖² + ‖ψ̄₁‖² = 1.
    pub psi0_bar: Vec<C64>,
    pub psi1_bar: Vec<C64>,
    pub psi0: PureState,
    pub psi1: PureState,
    pub q_prime: f64,
    /// Initial fidelity S = √⟨ψ|ρ|ψ⟩.
    pub s: f64,
}

/// Residuals and margins of one coupling instance.
#[derive(Debug, Clone)]
pub struct CouplingCheck {
    pub decomposition: CouplingDecomposition,
    /// Trace norm of (1−p)ρ₀ + pρ₁ − ℰ_U^p(ρ).
    pub mixed_residual: f64,
    /// Trace norm of q′|ψ₁⟩⟨ψ₁| + (1−q′)|ψ₀⟩⟨ψ₀| − ℰ_U^q(|ψ⟩⟨ψ|).
    pub pure_residual: f64,
    /// |cos²α + sin²α − 1|.
    pub angle_residual: f64,
    /// √F of the two channel outputs.
    pub fidelity: f64,
    /// √((1−p)(1−q′)) √F(ρ₀, ψ₀) + √(pq′) √F(ρ₁, ψ₁).
    pub split: f64,
    /// fidelity − split (strong concavity).
    pub concavity_margin: f64,
    /// split minus the closed-form lower bound.
    pub bound_margin: f64,
}

/// cos α = √(pq) + √((1−p)(1−q)), sin α = √((1−p)q) − √((1−q)p).
pub fn coupling_angle(p: f64, q: f64) -> (f64, f64) {
    ((p * q).sqrt() + ((1.0 - p) * (1.0 - q)).sqrt(), ((1.0 - p) * q).sqrt() - ((1.0 - q) * p).sqrt())
}

fn quadratic_form(m: &ComplexMatrix, phi: &[C64]) -> C64 {
    phi.iter().zip(&m.mul_vec(phi)).map(|(a, b)| a.conj() * b).sum()
}

fn combine(a: C64, x: &[C64], b: C64, y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(2.0 * half_trace_norm(m)?)
}

/// ψ̄₀ = √(1−q) cos α ψ + √q sin α Uψ and ψ̄₁ = √q cos α Uψ − √(1−q) sin α ψ,
/// with ψ₀, ψ₁ their normalisations and q′ = ‖ψ̄₁‖². A vanishing branch
/// falls back to ψ (branch 0) or Uψ (branch 1).
pub(crate) fn split_pure(psi: &[C64], u_psi: &[C64], q: f64, cos_a: f64, sin_a: f64) -> Result<(Vec<C64>, Vec<C64>, PureState, PureState)> {
    let re = |x: f64| C64::new(x, 0.0);
    let bar0 = combine(re((1.0 - q).sqrt() * cos_a), psi, re(q.sqrt() * sin_a), u_psi);
    let bar1 = combine(re(q.sqrt() * cos_a), u_psi, re(-(1.0 - q).sqrt() * sin_a), psi);
    let psi0 = if vec_norm(&bar0) > NULL_BRANCH { PureState::normalized(bar0.clone())? } else { PureState::normalized(psi.to_vec())? };
    let psi1 = if vec_norm(&bar1) > NULL_BRANCH { PureState::normalized(bar1.clone())? } else { PureState::normalized(u_psi.to_vec())? };
    Ok((bar0, bar1, psi0, psi1))
}

fn check_involution(u: &ComplexMatrix) -> Result<()> {
    let n = u.rows();
    let dev = (u - &u.adjoint()).max_abs().max((&u.matmul(u) - &ComplexMatrix::identity(n)).max_abs());
    if dev > INVOLUTION_TOL {
        return Err(Error::Precondition(format!("coupling unitary is not a self-adjoint involution: {dev:e}")));
    }
    Ok(())
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let mut h = m.clone();
    h.hermitize();
    Ok(hermitian_eig(&h)?.values[0])
}

/// Coupling of ℰ_U^p(ρ) and ℰ_U^q(|ψ⟩⟨ψ|) with ρ₀ = ρ, ρ₁ = UρU†.
pub fn build_coupling(rho: &DensityMatrix, psi: &PureState, u: &ComplexMatrix, p: f64, q: f64, eta: f64) -> Result<CouplingCheck> {
    build(rho, psi, u, p, q, eta, None)
}

/// Perturbed coupling with ρ₀ = ρ + pσ and ρ₁ = UρU† − (1−p)σ for a traceless
/// Hermitian σ; both branch states must stay positive semidefinite. The
/// bound gains the term (p|⟨ψ̄₀|σ|ψ̄₀⟩| + (1−p)|⟨ψ̄₁|σ|ψ̄₁⟩|)/S.
#[allow(clippy::too_many_arguments)]
pub fn build_coupling_perturbed(
    rho: &DensityMatrix,
    psi: &PureState,
    u: &ComplexMatrix,
    p: f64,
    q: f64,
    eta: f64,
    sigma: &ComplexMatrix,
) -> Result<CouplingCheck> {
    build(rho, psi, u, p, q, eta, Some(sigma))
}

fn build(
    rho: &DensityMatrix,
    psi: &PureState,
    u: &ComplexMatrix,
    p: f64,
    q: f64,
    eta: f64,
    sigma: Option<&ComplexMatrix>,
) -> Result<CouplingCheck> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::Precondition(format!("eta {eta} outside (0, 1/2)")));
    }
    for x in [p, q] {
        if x < eta || x > 1.0 - eta {
            return Err(Error::EtaBand(x, eta));
        }
    }
    if rho.dim() != psi.dim() || u.rows() != rho.dim() {
        return Err(Error::DimMismatch(rho.dim(), psi.dim()));
    }
    check_involution(u)?;
    let s = rho.expectation(psi.amplitudes()).max(0.0).sqrt();
    if s == 0.0 {
        return Err(Error::Precondition("initial fidelity S is zero".into()));
    }

    let rotated = rho.matrix().conjugate_by(u);
    let (mut m0, mut m1) = (rho.matrix().clone(), rotated.clone());
    if let Some(sig) = sigma {
        m0.add_scaled(sig, p);
        m1.add_scaled(sig, -(1.0 - p));
        let lowest = min_eigenvalue(&m0)?.min(min_eigenvalue(&m1)?);
        if lowest < -PSD_TOL {
            return Err(Error::PerturbationTooLarge(lowest));
        }
    }
    let rho0 = DensityMatrix::from_matrix_unchecked(m0);
    let rho1 = DensityMatrix::from_matrix_unchecked(m1);

    let (cos_alpha, sin_alpha) = coupling_angle(p, q);
    let v = psi.amplitudes();
    let uv = u.mul_vec(v);
    let (psi0_bar, psi1_bar, psi0, psi1) = split_pure(v, &uv, q, cos_alpha, sin_alpha)?;
    let q_prime = vec_norm(&psi1_bar).powi(2);

    let mut channel_rho = rho.matrix().scale_real(1.0 - p);
    channel_rho.add_scaled(&rotated, p);
    let mut mixed = rho0.matrix().scale_real(1.0 - p);
    mixed.add_scaled(rho1.matrix(), p);
    let mixed_residual = trace_norm(&(&mixed - &channel_rho))?;

    let pure_in = psi.density();
    let mut channel_psi = pure_in.matrix().scale_real(1.0 - q);
    channel_psi.add_scaled(&pure_in.matrix().conjugate_by(u), q);
    let mut pure_mix = psi1.density().into_matrix().scale_real(q_prime);
    pure_mix.add_scaled(psi0.density().matrix(), 1.0 - q_prime);
    let pure_residual = trace_norm(&(&pure_mix - &channel_psi))?;

    let fidelity = sqrt_fidelity(
        &DensityMatrix::from_matrix_unchecked(channel_rho),
        &DensityMatrix::from_matrix_unchecked(channel_psi),
    )?;
    let split = ((1.0 - p) * (1.0 - q_prime)).sqrt() * rho0.expectation(psi0.amplitudes()).max(0.0).sqrt()
        + (p * q_prime).sqrt() * rho1.expectation(psi1.amplitudes()).max(0.0).sqrt();

    let first = quadratic_form(&(&rotated - rho.matrix()), v).norm();
    let second = (quadratic_form(&rho.matrix().matmul(u), v).re - s * s).abs();
    let mut bound = s - (p - q).powi(2) * first / (2.0 * eta * s) - (p - q).powi(2) * second * second / (8.0 * eta * eta * s.powi(3));
    if let Some(sig) = sigma {
        bound -= (p * quadratic_form(sig, &psi0_bar).norm() + (1.0 - p) * quadratic_form(sig, &psi1_bar).norm()) / s;
    }

    Ok(CouplingCheck {
        mixed_residual,
        pure_residual,
        angle_residual: (cos_alpha * cos_alpha + sin_alpha * sin_alpha - 1.0).abs(),
        fidelity,
        split,
        concavity_margin: fidelity - split,
        bound_margin: split - bound,
        decomposition: CouplingDecomposition { p, q, cos_alpha, sin_alpha, rho0, rho1, psi0_bar, psi1_bar, psi0, psi1, q_prime, s },
    })
}
