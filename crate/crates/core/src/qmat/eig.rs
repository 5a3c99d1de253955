use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tol;

/// Eigendecomposition `h = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// V f(Λ) V†
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for k in 0..n {
                    if fv[k] != 0.0 {
                        s += v[(i, k)] * v[(j, k)].conj() * fv[k];
                    }
                }
                out[(i, j)] = s;
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    hermitian_eig_with(h, tol::DEFAULT.eig_input_hermitian)
}

pub fn hermitian_eig_with(h: &ComplexMatrix, hermitian_tol: f64) -> Result<HermitianEigen> {
    let dev = h.hermitian_deviation();
    if dev > hermitian_tol {
        return Err(Error::NotHermitian(dev));
    }
    let n = h.rows();
    let mut a = h.clone();
    a.hermitize();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        let target = scale * f64::EPSILON;
        for _ in 0..MAX_SWEEPS {
            let off: f64 = off_diagonal_norm(&a);
            if off <= target {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(HermitianEigen { values: pairs.iter().map(|p| p.0).collect(), vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates a[p][q] with the unitary W = diag(1, e^{-iφ})·[[c, s], [-s, c]].
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;
    let zeta = (aqq - app) / (2.0 * mag);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let w00 = C64::new(c, 0.0);
    let w01 = C64::new(s, 0.0);
    let w10 = -phase.conj() * s;
    let w11 = phase.conj() * c;
    let n = a.rows();
    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * w00 + y * w10;
        a[(k, q)] = x * w01 + y * w11;
    }
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = w00.conj() * x + w10.conj() * y;
        a[(q, k)] = w01.conj() * x + w11.conj() * y;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * w00 + y * w10;
        v[(k, q)] = x * w01 + y * w11;
    }
}
