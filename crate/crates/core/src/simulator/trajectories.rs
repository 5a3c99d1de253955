use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracles::OneTimeChannel;
use crate::qmat::{vec_norm, ComplexMatrix, DensityMatrix, PureState, C64};
use crate::rng;

use super::circuit::{Circuit, Step};

/// One unravelled run of a circuit under the one-time oracle.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySample {
    /// Seed of this trajectory's generator (base seed plus trajectory index).
    pub seed: u64,
    /// X_t for every oracle call, arm k at position k − 1.
    pub history: Vec<Vec<bool>>,
    #[serde(skip)]
    pub state: PureState,
    /// Outcome index of the last measurement, or of a computational-basis
    /// measurement of the final state if the circuit has none.
    pub outcome: usize,
    pub queries: usize,
}

fn projector_probability(psi: &[C64], p: &ComplexMatrix) -> f64 {
    let v = p.mul_vec(psi);
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn trajectory(circuit: &Circuit, oracle: &OneTimeChannel, initial: &PureState, seed: u64) -> Result<TrajectorySample> {
    let mut rng = rng::seeded(seed);
    let mut psi = initial.amplitudes().to_vec();
    let mut history = Vec::new();
    let mut outcome = None;
    for step in &circuit.steps {
        match step {
            Step::Unitary(u) => psi = u.mul_vec(&psi),
            Step::OracleCall { .. } => {
                let mut x = Vec::with_capacity(oracle.stages().len());
                for stage in oracle.stages() {
                    let fired = rng.random::<f64>() < stage.p;
                    if fired {
                        psi = stage.oracle.mul_vec(&psi);
                    }
                    x.push(fired);
                }
                history.push(x);
            }
            Step::Measure(ps) => {
                let probs: Vec<f64> = ps.iter().map(|p| projector_probability(&psi, p)).collect();
                let k = rng::sample_index(&probs, &mut rng);
                let projected = ps[k].mul_vec(&psi);
                let norm = vec_norm(&projected);
                psi = projected.into_iter().map(|z| z / norm).collect();
                outcome = Some(k);
            }
        }
    }
    let outcome = match outcome {
        Some(k) => k,
        None => {
            let probs: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
            rng::sample_index(&probs, &mut rng)
        }
    };
    let queries = history.len();
    Ok(TrajectorySample { seed, history, state: PureState::normalized(psi)?, outcome, queries })
}

/// Samples `n_samples` trajectories; trajectory k uses seed `seed + k`.
/// Trajectories run in parallel and are returned in index order.
pub fn run_trajectories(
    circuit: &Circuit,
    oracle: &OneTimeChannel,
    initial: &PureState,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<TrajectorySample>> {
    circuit.validate()?;
    if initial.dim() != circuit.dim {
        return Err(Error::DimMismatch(initial.dim(), circuit.dim));
    }
    (0..n_samples as u64)
        .into_par_iter()
        .map(|k| trajectory(circuit, oracle, initial, seed.wrapping_add(k)))
        .collect()
}

/// Empirical mixture of the trajectories' final states.
pub fn average_state(samples: &[TrajectorySample]) -> Result<DensityMatrix> {
    let first = samples.first().ok_or_else(|| Error::Precondition("no trajectories".into()))?;
    let n = first.state.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    let w = 1.0 / samples.len() as f64;
    for s in samples {
        acc.add_scaled(&s.state.density().into_matrix(), w);
    }
    Ok(DensityMatrix::from_matrix_unchecked(acc))
}
