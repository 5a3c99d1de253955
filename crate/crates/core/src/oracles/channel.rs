use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix};

use super::reward::RewardVector;
use super::unitary::{make_arm_oracle, make_ox, Flip, Registers};

/// Largest arm count for which the 2^N-term mixture is materialised.
pub const EXPLICIT_MIXTURE_CAP: usize = 12;

/// Channel given by an explicit Kraus set.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Self {
        KrausChannel { ops }
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.apply_matrix(rho.matrix()))
    }

    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        for k in &self.ops {
            out = &out + &m.conjugate_by(k);
        }
        out
    }

    /// ‖Σ K† K − Id‖_F
    pub fn completeness_residual(&self) -> f64 {
        let n = self.ops[0].cols();
        let mut s = ComplexMatrix::zeros(n, n);
        for k in &self.ops {
            s = &s + &k.adjoint().matmul(k);
        }
        (&s - &ComplexMatrix::identity(n)).frobenius_norm()
    }
}

/// ℱ_i^p(ρ) = (1 − p)ρ + p O_i ρ O_i†.
#[derive(Debug, Clone)]
pub struct ArmChannel {
    pub arm: usize,
    pub p: f64,
    pub oracle: ComplexMatrix,
}

impl ArmChannel {
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.apply_matrix(rho.matrix()))
    }

    /// Also valid for non-positive or traceless operators (the map is linear).
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = m.scale_real(1.0 - self.p);
        if self.p != 0.0 {
            out.add_scaled(&m.conjugate_by(&self.oracle), self.p);
        }
        out
    }

    pub fn kraus(&self) -> KrausChannel {
        let n = self.oracle.rows();
        KrausChannel::new(vec![
            ComplexMatrix::identity(n).scale_real((1.0 - self.p).sqrt()),
            self.oracle.scale_real(self.p.sqrt()),
        ])
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    Ok(())
}

/// One pull of arm `arm`: Kraus operators {√(1−p)·Id, √p·O_i}.
pub fn make_channel_f(arm: usize, p: f64, flip: Flip, regs: &Registers) -> Result<ArmChannel> {
    check_probability(p)?;
    Ok(ArmChannel { arm, p, oracle: make_arm_oracle(arm, flip, regs)? })
}

/// One-time oracle ℰ^p = ℱ_1^{p_1} ∘ … ∘ ℱ_N^{p_N}, applied stage by stage.
#[derive(Debug, Clone)]
pub struct OneTimeChannel {
    stages: Vec<ArmChannel>,
    flip: Flip,
    regs: Registers,
    means: Vec<f64>,
}

pub fn make_channel_e(rewards: &RewardVector, flip: Flip, regs: &Registers) -> Result<OneTimeChannel> {
    if rewards.n_arms() != regs.n_arms {
        return Err(Error::Precondition(format!("{} means for {} arms", rewards.n_arms(), regs.n_arms)));
    }
    let stages = (1..=regs.n_arms).map(|i| make_channel_f(i, rewards.mean(i), flip, regs)).collect::<Result<_>>()?;
    Ok(OneTimeChannel { stages, flip, regs: *regs, means: rewards.means().to_vec() })
}

impl OneTimeChannel {
    pub fn stages(&self) -> &[ArmChannel] {
        &self.stages
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.apply_matrix(rho.matrix()))
    }

    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        // Stages commute; apply ℱ_N first so the composition reads ℱ_1 ∘ … ∘ ℱ_N.
        let mut out = m.clone();
        for stage in self.stages.iter().rev() {
            out = stage.apply_matrix(&out);
        }
        out
    }

    /// P(X) = Π p_i^{x_i} (1 − p_i)^{1 − x_i}.
    pub fn sample_probability(&self, x: &[bool]) -> f64 {
        self.means.iter().zip(x).map(|(&p, &b)| if b { p } else { 1.0 - p }).product()
    }

    /// All 2^N reward samples with their probabilities (arm 1 is the slowest bit).
    pub fn samples(&self) -> Result<Vec<(Vec<bool>, f64)>> {
        let n = self.means.len();
        if n > EXPLICIT_MIXTURE_CAP {
            return Err(Error::UseSequential(n, EXPLICIT_MIXTURE_CAP));
        }
        Ok((0..1usize << n)
            .map(|code| {
                let x: Vec<bool> = (0..n).map(|k| code >> (n - 1 - k) & 1 == 1).collect();
                let w = self.sample_probability(&x);
                (x, w)
            })
            .collect())
    }

    /// Kraus form {√P(X)·O_X}.
    pub fn explicit_mixture(&self) -> Result<KrausChannel> {
        let ops = self
            .samples()?
            .into_iter()
            .map(|(x, w)| Ok(make_ox(&x, self.flip, &self.regs)?.scale_real(w.sqrt())))
            .collect::<Result<_>>()?;
        Ok(KrausChannel::new(ops))
    }
}
