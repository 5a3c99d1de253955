//! Numerical tolerances shared by every module.
//!
//! [`Tolerances::default`] holds the built-in values; callers that need
//! different thresholds construct their own instance and pass it to the
//! `_with` variants of the affected operations.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity of matrices flagged Hermitian.
    pub hermitian: f64,
    /// Hermiticity demanded on input to the eigensolver.
    pub eig_input_hermitian: f64,
    /// Distance of a density matrix trace from one.
    pub trace: f64,
    /// Eigenvalues in `[-eig_clamp, 0)` are clamped to zero.
    pub eig_clamp: f64,
    /// Distance of a pure-state norm from one.
    pub norm: f64,
    /// Purity above `1 - rank_one` selects the rank-1 fidelity path.
    pub rank_one: f64,
    /// Trace drift that aborts a simulation.
    pub blowup: f64,
    /// Completeness of projective measurements.
    pub projector_sum: f64,
    /// Largest matrix dimension any constructor may produce.
    pub dim_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        DEFAULT
    }
}

pub const DEFAULT: Tolerances = Tolerances {
    hermitian: 1e-12,
    eig_input_hermitian: 1e-10,
    trace: 1e-10,
    eig_clamp: 1e-10,
    norm: 1e-10,
    rank_one: 1e-12,
    blowup: 1e-8,
    projector_sum: 1e-10,
    dim_cap: 4096,
};
