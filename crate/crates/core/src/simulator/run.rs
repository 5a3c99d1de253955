use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracles::{make_channel_e, make_erm_oracle, make_ox, OneTimeChannel, OracleKind, OracleModel};
use crate::qmat::{fidelity, purity, ComplexMatrix, DensityMatrix};
use crate::tol::DEFAULT;

use super::circuit::{Circuit, Step};

/// State summary after one circuit step (step 0 is the initial state).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub purity: f64,
    /// F against the reference run at the same step.
    pub fidelity: f64,
    /// Oracle invocations so far.
    pub queries: usize,
}

#[derive(Debug, Clone)]
pub struct Transcript {
    pub records: Vec<StepRecord>,
    /// `states[k]` is the state after step k; `states[0]` is the input.
    pub states: Vec<DensityMatrix>,
    /// Outcome distribution of the last `Measure` step, or the
    /// computational-basis diagonal of the final state if there is none.
    pub distribution: Vec<f64>,
}

impl Transcript {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("transcript always holds the initial state")
    }

    pub fn queries(&self) -> usize {
        self.records.last().map_or(0, |r| r.queries)
    }
}

#[derive(Debug, Clone)]
pub struct PairedTranscript {
    pub a: Transcript,
    pub b: Transcript,
    /// F(ρ_a, ρ_b) after every step, starting with the input.
    pub fidelities: Vec<f64>,
}

/// The oracle model compiled into matrices once per run.
enum Compiled {
    Channel(OneTimeChannel),
    Unitary(ComplexMatrix),
    Samples(Vec<ComplexMatrix>),
    /// Oracle calls act trivially; used for reference runs.
    Identity,
}

impl Compiled {
    fn new(model: &OracleModel) -> Result<Self> {
        Ok(match &model.kind {
            OracleKind::OneTimeChannel(p) => Compiled::Channel(make_channel_e(p, model.flip, &model.regs)?),
            OracleKind::ErmUnitary(table) => Compiled::Unitary(make_erm_oracle(table)?),
            OracleKind::ReusableSample(xs) => {
                Compiled::Samples(xs.iter().map(|x| make_ox(x, model.flip, &model.regs)).collect::<Result<_>>()?)
            }
        })
    }

    fn apply(&self, rho: &DensityMatrix, sample: usize) -> Result<DensityMatrix> {
        match self {
            Compiled::Channel(e) => Ok(e.apply(rho)),
            Compiled::Unitary(u) => Ok(rho.evolve(u)),
            Compiled::Samples(us) => {
                let u = us.get(sample).ok_or_else(|| {
                    Error::Precondition(format!("oracle call selects sample {sample} but only {} were drawn", us.len()))
                })?;
                Ok(rho.evolve(u))
            }
            Compiled::Identity => Ok(rho.clone()),
        }
    }
}

/// Outcome probabilities tr(P_k ρ) after checking Σ P_k = Id.
pub fn measure(state: &DensityMatrix, projectors: &[ComplexMatrix]) -> Result<Vec<f64>> {
    let n = state.dim();
    let mut sum = ComplexMatrix::zeros(n, n);
    for p in projectors {
        if p.rows() != n || p.cols() != n {
            return Err(Error::DimMismatch(p.rows(), n));
        }
        sum = &sum + p;
    }
    let residual = (&sum - &ComplexMatrix::identity(n)).max_abs();
    if residual > DEFAULT.projector_sum {
        return Err(Error::IncompleteProjectors(residual));
    }
    Ok(projectors.iter().map(|p| state.matrix().trace_product(p).re.max(0.0)).collect())
}

fn diagonal(rho: &DensityMatrix) -> Vec<f64> {
    (0..rho.dim()).map(|k| rho.matrix()[(k, k)].re.max(0.0)).collect()
}

fn dephase(rho: &DensityMatrix, projectors: &[ComplexMatrix]) -> DensityMatrix {
    let n = rho.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for p in projectors {
        out = &out + &p.matmul(rho.matrix()).matmul(p);
    }
    DensityMatrix::from_matrix_unchecked(out)
}

fn check_trace(rho: &DensityMatrix) -> Result<()> {
    let drift = (rho.matrix().trace().re - 1.0).abs();
    if drift > DEFAULT.blowup || drift.is_nan() {
        return Err(Error::NumericalBlowup(drift));
    }
    Ok(())
}

/// States after every step plus the terminal distribution.
fn evolve(circuit: &Circuit, oracle: &Compiled, initial: &DensityMatrix) -> Result<(Vec<DensityMatrix>, Vec<usize>, Vec<f64>)> {
    circuit.validate()?;
    if initial.dim() != circuit.dim {
        return Err(Error::DimMismatch(initial.dim(), circuit.dim));
    }
    let mut states = Vec::with_capacity(circuit.steps.len() + 1);
    let mut queries = Vec::with_capacity(circuit.steps.len() + 1);
    let mut distribution = None;
    let mut rho = initial.clone();
    let mut q = 0;
    states.push(rho.clone());
    queries.push(0);
    for step in &circuit.steps {
        rho = match step {
            Step::Unitary(u) => rho.evolve(u),
            Step::OracleCall { sample } => {
                q += 1;
                oracle.apply(&rho, *sample)?
            }
            Step::Measure(ps) => {
                distribution = Some(measure(&rho, ps)?);
                dephase(&rho, ps)
            }
        };
        check_trace(&rho)?;
        states.push(rho.clone());
        queries.push(q);
    }
    let distribution = distribution.unwrap_or_else(|| diagonal(&rho));
    Ok((states, queries, distribution))
}

fn transcript(states: Vec<DensityMatrix>, queries: Vec<usize>, distribution: Vec<f64>, reference: &[DensityMatrix]) -> Result<Transcript> {
    let records = states
        .iter()
        .zip(reference)
        .zip(&queries)
        .enumerate()
        .map(|(step, ((rho, r), &queries))| {
            Ok(StepRecord { step, purity: purity(rho), fidelity: fidelity(rho, r)?, queries })
        })
        .collect::<Result<_>>()?;
    Ok(Transcript { records, states, distribution })
}

/// Exact evolution; fidelities are taken against the oracle-free run of the
/// same circuit.
pub fn run_exact(circuit: &Circuit, oracle: &OracleModel, initial: &DensityMatrix) -> Result<Transcript> {
    let (reference, _, _) = evolve(circuit, &Compiled::Identity, initial)?;
    let (states, queries, dist) = evolve(circuit, &Compiled::new(oracle)?, initial)?;
    transcript(states, queries, dist, &reference)
}

/// The circuit with every oracle call replaced by the identity.
pub fn run_unitary_only(circuit: &Circuit, initial: &DensityMatrix) -> Result<Transcript> {
    let (states, queries, dist) = evolve(circuit, &Compiled::Identity, initial)?;
    let reference = states.clone();
    transcript(states, queries, dist, &reference)
}

/// Runs both oracles through the same circuit. Each transcript's fidelity
/// column is taken against the other run.
pub fn run_paired(circuit: &Circuit, oracle_a: &OracleModel, oracle_b: &OracleModel, initial: &DensityMatrix) -> Result<PairedTranscript> {
    if oracle_a.dim() != oracle_b.dim() {
        return Err(Error::DimMismatch(oracle_a.dim(), oracle_b.dim()));
    }
    let (sa, qa, da) = evolve(circuit, &Compiled::new(oracle_a)?, initial)?;
    let (sb, qb, db) = evolve(circuit, &Compiled::new(oracle_b)?, initial)?;
    let a = transcript(sa, qa, da, &sb)?;
    let b = transcript(sb, qb, db, &a.states)?;
    let fidelities = a.records.iter().map(|r| r.fidelity).collect();
    Ok(PairedTranscript { a, b, fidelities })
}
