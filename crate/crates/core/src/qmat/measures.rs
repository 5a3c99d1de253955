use super::eig::{hermitian_eig, HermitianEigen};
use super::matrix::ComplexMatrix;
use super::state::DensityMatrix;
use crate::error::{Error, Result};
use crate::tol::{Tolerances, DEFAULT};

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(rho.dim(), sigma.dim()));
    }
    Ok(())
}

fn clamp_eigenvalue(x: f64, tol: &Tolerances) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -tol.eig_clamp {
        Ok(0.0)
    } else {
        Err(Error::NegativeEigenvalue(x))
    }
}

/// Square root of a positive semidefinite matrix, clamping tiny negative
/// eigenvalues to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt_with(m, &DEFAULT)
}

pub fn psd_sqrt_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    clamped(&eig, tol)?;
    let floor = noise_floor(&eig.values);
    Ok(eig.reassemble(|x| if x > floor { x.sqrt() } else { 0.0 }))
}

/// Eigenvalues below this level are indistinguishable from rounding noise of
/// the decomposition; their square roots would inject O(√ε) errors.
fn noise_floor(values: &[f64]) -> f64 {
    let max = values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    4.0 * values.len() as f64 * f64::EPSILON * max
}

fn clamped(eig: &HermitianEigen, tol: &Tolerances) -> Result<Vec<f64>> {
    eig.values.iter().map(|&x| clamp_eigenvalue(x, tol)).collect()
}

/// Tr ρ².
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().trace_product(rho.matrix()).re
}

/// √F(ρ, σ) = ‖ρ^{1/2} σ^{1/2}‖_tr.
pub fn sqrt_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    sqrt_fidelity_with(rho, sigma, &DEFAULT)
}

pub fn sqrt_fidelity_with(rho: &DensityMatrix, sigma: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    check_dims(rho, sigma)?;
    if purity(rho) >= 1.0 - tol.rank_one || purity(sigma) >= 1.0 - tol.rank_one {
        let overlap = rho.matrix().trace_product(sigma.matrix()).re;
        return Ok(overlap.clamp(0.0, 1.0).sqrt());
    }
    let root = psd_sqrt_with(rho.matrix(), tol)?;
    let mut inner = root.matmul(sigma.matrix()).matmul(&root);
    inner.hermitize();
    let eig = hermitian_eig(&inner)?;
    let floor = noise_floor(&eig.values);
    let s: f64 = clamped(&eig, tol)?.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum();
    Ok(s.min(1.0))
}

/// F(ρ, σ) = (√F)².
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    sqrt_fidelity(rho, sigma).map(|s| s * s)
}

pub fn fidelity_with(rho: &DensityMatrix, sigma: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    sqrt_fidelity_with(rho, sigma, tol).map(|s| s * s)
}

/// Half the trace norm of ρ − σ.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let mut diff = rho.matrix() - sigma.matrix();
    diff.hermitize();
    Ok(0.5 * hermitian_eig(&diff)?.values.iter().map(|x| x.abs()).sum::<f64>())
}

/// Half the trace norm of a Hermitian matrix.
pub fn half_trace_norm(h: &ComplexMatrix) -> Result<f64> {
    let mut m = h.clone();
    m.hermitize();
    Ok(0.5 * hermitian_eig(&m)?.values.iter().map(|x| x.abs()).sum::<f64>())
}

/// Optimal two-state discrimination probability 1/2 + T(ρ,σ)/2.
pub fn helstrom_success(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(0.5 + 0.5 * trace_distance(rho, sigma)?)
}

/// Subsystem layout for partial traces: local dimensions (first factor slow)
/// and the ascending list of kept factor indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsystems {
    pub dims: Vec<usize>,
    pub keep: Vec<usize>,
}

impl Subsystems {
    pub fn new(dims: &[usize], keep: &[usize]) -> Self {
        Subsystems { dims: dims.to_vec(), keep: keep.to_vec() }
    }

    fn validate(&self, total: usize) -> Result<()> {
        let prod: usize = self.dims.iter().product();
        if self.dims.is_empty() || self.dims.contains(&0) || prod != total {
            return Err(Error::BadSubsystem(format!("dims {:?} do not factor {}", self.dims, total)));
        }
        if self.keep.windows(2).any(|w| w[0] >= w[1]) || self.keep.iter().any(|&k| k >= self.dims.len()) {
            return Err(Error::BadSubsystem(format!("keep {:?} invalid for {} factors", self.keep, self.dims.len())));
        }
        Ok(())
    }

    pub fn kept_dim(&self) -> usize {
        self.keep.iter().map(|&k| self.dims[k]).product()
    }

    /// (kept index, traced index) of a full basis index.
    fn split(&self, mut idx: usize) -> (usize, usize) {
        let m = self.dims.len();
        let mut digits = vec![0; m];
        for f in (0..m).rev() {
            digits[f] = idx % self.dims[f];
            idx /= self.dims[f];
        }
        let (mut kept, mut traced) = (0, 0);
        for f in 0..m {
            if self.keep.contains(&f) {
                kept = kept * self.dims[f] + digits[f];
            } else {
                traced = traced * self.dims[f] + digits[f];
            }
        }
        (kept, traced)
    }
}

/// Partial trace of an arbitrary square operator over the factors not kept.
pub fn partial_trace_operator(m: &ComplexMatrix, spec: &Subsystems) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::BadSubsystem("operator is not square".into()));
    }
    spec.validate(m.rows())?;
    let n = m.rows();
    let split: Vec<(usize, usize)> = (0..n).map(|i| spec.split(i)).collect();
    let mut out = ComplexMatrix::zeros(spec.kept_dim(), spec.kept_dim());
    for r in 0..n {
        for c in 0..n {
            if split[r].1 == split[c].1 {
                out[(split[r].0, split[c].0)] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityMatrix, spec: &Subsystems) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_matrix_unchecked(partial_trace_operator(rho.matrix(), spec)?))
}
