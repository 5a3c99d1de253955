//! Closed-form bound calculators and numerical verifiers for the fidelity,
//! purity and coupling lemmas underlying the query lower bounds.

pub mod complexity;
pub mod coupling;
pub mod history;
pub mod ledger;
pub mod lemmas;
pub mod random;
pub mod report;
pub mod suites;

pub use complexity::{complexity_h, fidelity_ceiling, grover_lower_bound, optimal_constant};
pub use coupling::{build_coupling, build_coupling_perturbed, coupling_angle, CouplingCheck, CouplingDecomposition};
pub use history::{build_history_decomposition, BranchPurity, HistoryBranch, HistoryDecomposition, HistoryStep};
pub use ledger::{
    accumulation_check, classical_ledger, classical_ledger_pair, purity_ledger, random_policy, round_robin, AccumulationCheck,
    ClassicalLedger, ClassicalLedgerStep, Policy, PurityLedgerRow,
};
pub use lemmas::{
    bound_cos_margin, bound_sin_margin, check_fid_corollary1, check_fidelity_lemma, check_projection_lemma, purity_identity_residual,
    reward_lemma_margins, sqrt_lemma_margin, Corollary1Margins, FidelityLemmaMargins,
};
pub use report::{reports_to_json, CheckReport, MarginTable, MarginTracker};
pub use suites::{default_trials, run_suite, SUITES};
