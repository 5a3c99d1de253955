//! Exact density-matrix execution of circuits that interleave unitaries with
//! oracle calls, paired runs for fidelity ledgers, and a trajectory sampler
//! for the one-time oracle channel.

mod circuit;
mod export;
mod run;
mod trajectories;

pub use circuit::{Circuit, Step};
pub use export::{trajectories_to_csv, transcript_to_json};
pub use run::{measure, run_exact, run_paired, run_unitary_only, PairedTranscript, StepRecord, Transcript};
pub use trajectories::{average_state, run_trajectories, TrajectorySample};
