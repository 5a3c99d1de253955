//! Random instance generators for the verification sweeps.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::qmat::{hermitian_eig, ComplexMatrix, DensityMatrix, PureState, C64};
use crate::rng::Rng;

pub fn gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("shape")
}

/// Normalised complex Gaussian vector.
pub fn pure_state(dim: usize, rng: &mut Rng) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// G·G† / tr for a `dim × rank` Gaussian G.
pub fn density_with_rank(dim: usize, rank: usize, rng: &mut Rng) -> DensityMatrix {
    let g = gaussian_matrix(dim, rank, rng);
    let mut m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m = m.scale_real(1.0 / tr);
    m.hermitize();
    DensityMatrix::from_matrix_unchecked(m)
}

/// Wishart-style density matrix with rank drawn uniformly from 1..=dim.
pub fn density(dim: usize, rng: &mut Rng) -> DensityMatrix {
    let rank = rng.random_range(1..=dim);
    density_with_rank(dim, rank, rng)
}

pub fn full_rank_density(dim: usize, rng: &mut Rng) -> DensityMatrix {
    density_with_rank(dim, dim, rng)
}

pub fn hermitian(dim: usize, rng: &mut Rng) -> ComplexMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let mut h = &g + &g.adjoint();
    h.hermitize();
    h
}

/// Haar-distributed unitary from Gram–Schmidt on a Gaussian matrix.
pub fn unitary(dim: usize, rng: &mut Rng) -> ComplexMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let norm = crate::qmat::vec_norm(&v);
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    u
}

/// Self-adjoint unitary V·diag(±1)·V†, with at least one sign of each kind
/// when dim ≥ 2.
pub fn involution(dim: usize, rng: &mut Rng) -> ComplexMatrix {
    let v = unitary(dim, rng);
    let mut signs: Vec<f64> = (0..dim).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    if dim >= 2 && signs.iter().all(|&s| s == signs[0]) {
        signs[0] = -signs[0];
    }
    let mut u = ComplexMatrix::from_diag(&signs).conjugate_by(&v);
    u.hermitize();
    u
}

/// Random Kraus set {K_k S^{-1/2}} with S = Σ K_k† K_k.
pub fn kraus_channel(dim: usize, n_ops: usize, rng: &mut Rng) -> Vec<ComplexMatrix> {
    let raw: Vec<ComplexMatrix> = (0..n_ops).map(|_| gaussian_matrix(dim, dim, rng)).collect();
    let mut s = ComplexMatrix::zeros(dim, dim);
    for k in &raw {
        s = &s + &k.adjoint().matmul(k);
    }
    s.hermitize();
    let inv_sqrt = hermitian_eig(&s).expect("hermitian").reassemble(|x| 1.0 / x.sqrt());
    raw.iter().map(|k| k.matmul(&inv_sqrt)).collect()
}

/// Σ_k K_k ρ K_k†
pub fn apply_kraus(kraus: &[ComplexMatrix], rho: &DensityMatrix) -> DensityMatrix {
    let dim = rho.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for k in kraus {
        out = &out + &rho.matrix().conjugate_by(k);
    }
    out.hermitize();
    DensityMatrix::from_matrix_unchecked(out)
}

/// Point uniformly distributed on the probability simplex.
pub fn simplex(n: usize, rng: &mut Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}

/// Family (p₀, …, p_N) inside [η, 1 − η] with p₀ − p₁ = p₁ − p₂ > 0 and a
/// descending tail drawn below p₂.
pub fn reward_family(n_arms: usize, eta: f64, rng: &mut Rng) -> crate::Result<crate::oracles::RewardFamily> {
    let span = 1.0 - 2.0 * eta;
    let gap = span / 2.0 * rng.random_range(0.02..1.0);
    let p2 = eta + (span - 2.0 * gap) * rng.random::<f64>();
    let mut base = vec![p2 + 2.0 * gap, p2 + gap, p2];
    let mut tail: Vec<f64> = (3..=n_arms).map(|_| eta + (p2 - eta) * rng.random::<f64>()).collect();
    tail.sort_by(|a, b| b.total_cmp(a));
    base.extend(tail);
    crate::oracles::RewardFamily::new(base, eta)
}
