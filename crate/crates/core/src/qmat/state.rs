use super::eig::hermitian_eig;
use super::matrix::{vec_norm, ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::tol::{Tolerances, DEFAULT};

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::new_with(mat, &DEFAULT)
    }

    pub fn new_with(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidDensity(format!("{}x{} is not square", mat.rows(), mat.cols())));
        }
        let dev = mat.hermitian_deviation();
        if dev > tol.hermitian {
            return Err(Error::InvalidDensity(format!("hermitian deviation {dev:e}")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = hermitian_eig(&mat)?.values.first().copied().unwrap_or(0.0);
        if min < -tol.eig_clamp {
            return Err(Error::InvalidDensity(format!("minimum eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { mat })
    }

    /// Wraps a matrix without validation. Used inside simulations where the
    /// state is produced by trace-preserving maps from a validated state.
    pub fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.is_square());
        DensityMatrix { mat }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityMatrix { mat: ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    /// diag(probs) after checking it is a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diag(probs))
    }

    /// Σ w_k ρ_k (weights are not renormalised).
    pub fn mixture(weights: &[f64], states: &[&DensityMatrix]) -> Self {
        assert_eq!(weights.len(), states.len());
        let dim = states[0].dim();
        let mut mat = ComplexMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            mat.add_scaled(&s.mat, *w);
        }
        DensityMatrix { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// U ρ U†
    pub fn evolve(&self, u: &ComplexMatrix) -> Self {
        DensityMatrix { mat: self.mat.conjugate_by(u) }
    }

    /// ⟨φ|ρ|φ⟩
    pub fn expectation(&self, phi: &[C64]) -> f64 {
        let rphi = self.mat.mul_vec(phi);
        phi.iter().zip(&rphi).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }
}

/// Normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > DEFAULT.norm {
            return Err(Error::InvalidPureState(norm));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalises a nonzero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidPureState(norm));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(PureState { amplitudes })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        PureState { amplitudes: super::matrix::gates::basis(dim, k) }
    }

    /// Uniform superposition over `dim` basis states.
    pub fn uniform(dim: usize) -> Self {
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        PureState { amplitudes: vec![a; dim] }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn evolve(&self, u: &ComplexMatrix) -> Self {
        PureState { amplitudes: u.mul_vec(&self.amplitudes) }
    }
}
