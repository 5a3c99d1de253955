use crate::error::{Error, Result};
use crate::qmat::ComplexMatrix;

#[derive(Debug, Clone)]
pub enum Step {
    Unitary(ComplexMatrix),
    /// One oracle invocation. For reusable-sample oracles `sample` selects
    /// which O_{X_t} is invoked; other models ignore it.
    OracleCall { sample: usize },
    /// Non-selective projective measurement: records the outcome
    /// distribution and dephases the state in the projector blocks.
    Measure(Vec<ComplexMatrix>),
}

#[derive(Debug, Clone)]
pub struct Circuit {
    pub dim: usize,
    pub steps: Vec<Step>,
}

impl Circuit {
    pub fn new(dim: usize) -> Self {
        Circuit { dim, steps: Vec::new() }
    }

    pub fn unitary(mut self, u: ComplexMatrix) -> Self {
        self.steps.push(Step::Unitary(u));
        self
    }

    pub fn oracle(mut self) -> Self {
        self.steps.push(Step::OracleCall { sample: 0 });
        self
    }

    pub fn oracle_sample(mut self, sample: usize) -> Self {
        self.steps.push(Step::OracleCall { sample });
        self
    }

    pub fn measure(mut self, projectors: Vec<ComplexMatrix>) -> Self {
        self.steps.push(Step::Measure(projectors));
        self
    }

    /// U_0, O, U_1, O, …, O, U_T for the given unitaries.
    pub fn interleaved(dim: usize, unitaries: &[ComplexMatrix]) -> Self {
        let mut c = Circuit::new(dim);
        for (k, u) in unitaries.iter().enumerate() {
            if k > 0 {
                c = c.oracle();
            }
            c = c.unitary(u.clone());
        }
        c
    }

    pub fn oracle_calls(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::OracleCall { .. })).count()
    }

    pub fn validate(&self) -> Result<()> {
        for step in &self.steps {
            let bad = match step {
                Step::Unitary(u) => (u.rows() != self.dim || u.cols() != self.dim).then_some(u.rows()),
                Step::Measure(ps) => ps.iter().find(|p| p.rows() != self.dim || p.cols() != self.dim).map(|p| p.rows()),
                Step::OracleCall { .. } => None,
            };
            if let Some(d) = bad {
                return Err(Error::DimMismatch(d, self.dim));
            }
        }
        Ok(())
    }
}
