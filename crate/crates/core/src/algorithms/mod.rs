//! Best-arm identification and search routines for the three oracle models,
//! each reporting the number of oracle invocations it used.

mod classical;
mod erm;
mod grover;
mod reusable;

pub use classical::{classical_successive_elimination, confidence_radius, one_time_successive_elimination, BanditInstance};
pub use erm::{ae_resolution, erm_best_arm, erm_mean_estimate, AmplitudeEstimate};
pub use grover::{
    faulty_grover_self_indicating, grover_channel_curve, grover_diffusion, grover_under_faulty_channel, self_flag_full_register,
    self_flag_reduced, FaultyGroverPlan,
};
pub use reusable::{amplify_search, cap_success_floor, hoeffding_flag, hoeffding_samples, reusable_best_arm, FlagOutcome, SearchOutcome};

/// Outcome of one algorithm run.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunResult {
    /// Chosen arm (1-based).
    pub arm: usize,
    pub queries: u64,
    /// Whether `arm` is the correct answer for the instance.
    pub success: bool,
    /// Pulls per arm for classical routines; empty otherwise.
    pub pulls: Vec<u64>,
    /// Final arm-register probabilities (Grover) or per-arm mean estimates
    /// (ERM, reusable); empty for classical routines.
    pub weights: Vec<f64>,
}
