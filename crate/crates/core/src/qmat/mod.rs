//! Dense complex linear algebra and distance measures between quantum states.

mod eig;
mod matrix;
mod measures;
mod state;

pub use eig::{hermitian_eig, hermitian_eig_with, HermitianEigen};
pub use matrix::{gates, inner, tensor, tensor_vec, tensor_with_cap, vec_norm, ComplexMatrix, C64, ONE, ZERO};
pub use measures::{
    fidelity, fidelity_with, half_trace_norm, helstrom_success, partial_trace, partial_trace_operator, psd_sqrt,
    psd_sqrt_with, purity, sqrt_fidelity, sqrt_fidelity_with, trace_distance, Subsystems,
};
pub use state::{DensityMatrix, PureState};
