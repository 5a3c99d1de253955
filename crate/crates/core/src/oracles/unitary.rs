use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, ONE};
use crate::tol::DEFAULT;

use super::reward::RewardVector;
use super::table::RewardTable;

/// How an oracle marks a rewarded arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flip {
    /// Flips the reward qubit: |i⟩|c⟩ → |i⟩|c ⊕ 1⟩.
    Bit,
    /// Multiplies the arm's block by −1.
    Phase,
}

impl std::fmt::Display for Flip {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flip::Bit => "bit",
            Flip::Phase => "phase",
        })
    }
}

/// Register layout `arm ⊗ omega ⊗ reward ⊗ work`, arm register slowest.
///
/// Arms are labelled `1..=n_arms` and occupy basis indices `0..n_arms` of the
/// arm register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Registers {
    pub n_arms: usize,
    /// Size of the internal-randomness register (1 when absent).
    pub n_omega: usize,
    pub reward_qubit: bool,
    /// Size of any further workspace (1 when absent).
    pub work_dim: usize,
}

impl Registers {
    /// Arm register only.
    pub fn arms(n_arms: usize) -> Self {
        Registers { n_arms, n_omega: 1, reward_qubit: false, work_dim: 1 }
    }

    /// Arm register and one reward qubit.
    pub fn arms_reward(n_arms: usize) -> Self {
        Registers { n_arms, n_omega: 1, reward_qubit: true, work_dim: 1 }
    }

    pub fn with_work(mut self, work_dim: usize) -> Self {
        self.work_dim = work_dim;
        self
    }

    pub fn reward_dim(&self) -> usize {
        if self.reward_qubit {
            2
        } else {
            1
        }
    }

    /// Dimension of one arm's block.
    pub fn block(&self) -> usize {
        self.n_omega * self.reward_dim() * self.work_dim
    }

    pub fn dim(&self) -> usize {
        self.n_arms * self.block()
    }

    /// Local dimensions in register order, omitting trivial factors.
    pub fn factors(&self) -> Vec<usize> {
        let mut f = vec![self.n_arms];
        if self.n_omega > 1 {
            f.push(self.n_omega);
        }
        if self.reward_qubit {
            f.push(2);
        }
        if self.work_dim > 1 {
            f.push(self.work_dim);
        }
        f
    }

    /// Basis index of |arm, omega, reward, work⟩ (arm 1-based).
    pub fn index(&self, arm: usize, omega: usize, reward: usize, work: usize) -> usize {
        (((arm - 1) * self.n_omega + omega) * self.reward_dim() + reward) * self.work_dim + work
    }

    fn check_arm(&self, arm: usize) -> Result<()> {
        if arm == 0 || arm > self.n_arms {
            return Err(Error::ArmOutOfRange(arm, self.n_arms));
        }
        Ok(())
    }

    fn check_cap(&self) -> Result<()> {
        if self.dim() > DEFAULT.dim_cap {
            return Err(Error::DimensionCap(self.dim(), DEFAULT.dim_cap));
        }
        Ok(())
    }
}

/// Fills `m` with the action of the flip on arm `arm`'s block. For the bit
/// flip the reward qubit of every (omega, work) slot is toggled.
fn write_arm_block(m: &mut ComplexMatrix, regs: &Registers, arm: usize, flip: Flip, omegas: &[bool]) {
    for (omega, &active) in omegas.iter().enumerate() {
        for w in 0..regs.work_dim {
            for c in 0..regs.reward_dim() {
                let from = regs.index(arm, omega, c, w);
                if !active {
                    m[(from, from)] = ONE;
                    continue;
                }
                match flip {
                    Flip::Phase => m[(from, from)] = -ONE,
                    Flip::Bit => {
                        let to = regs.index(arm, omega, 1 - c, w);
                        m[(to, from)] = ONE;
                    }
                }
            }
        }
    }
}

fn flip_needs_reward(flip: Flip, regs: &Registers) -> Result<()> {
    if flip == Flip::Bit && !regs.reward_qubit {
        return Err(Error::Precondition("bit-flip oracle requires a reward qubit".into()));
    }
    Ok(())
}

/// O_i: the flip unitary on arm `arm`'s block, identity elsewhere.
pub fn make_arm_oracle(arm: usize, flip: Flip, regs: &Registers) -> Result<ComplexMatrix> {
    regs.check_arm(arm)?;
    regs.check_cap()?;
    flip_needs_reward(flip, regs)?;
    let mut m = ComplexMatrix::zeros(regs.dim(), regs.dim());
    let all = vec![true; regs.n_omega];
    let none = vec![false; regs.n_omega];
    for a in 1..=regs.n_arms {
        write_arm_block(&mut m, regs, a, flip, if a == arm { &all } else { &none });
    }
    Ok(m)
}

/// O_X = Π_{i: X_i = 1} O_i for one sampled reward vector `x` (index k is arm k+1).
pub fn make_ox(x: &[bool], flip: Flip, regs: &Registers) -> Result<ComplexMatrix> {
    if x.len() != regs.n_arms {
        return Err(Error::Precondition(format!("reward sample of length {} for {} arms", x.len(), regs.n_arms)));
    }
    regs.check_cap()?;
    flip_needs_reward(flip, regs)?;
    let mut m = ComplexMatrix::zeros(regs.dim(), regs.dim());
    for (k, &bit) in x.iter().enumerate() {
        write_arm_block(&mut m, regs, k + 1, flip, &vec![bit; regs.n_omega]);
    }
    Ok(m)
}

/// P_i = |i⟩⟨i| ⊗ Id on the remaining registers.
pub fn arm_projector(arm: usize, regs: &Registers) -> Result<ComplexMatrix> {
    regs.check_arm(arm)?;
    let mut m = ComplexMatrix::zeros(regs.dim(), regs.dim());
    let start = (arm - 1) * regs.block();
    for k in start..start + regs.block() {
        m[(k, k)] = ONE;
    }
    Ok(m)
}

/// Oracle that flags its own firing: |i⟩|0⟩ → −|i⟩|1⟩ for the target,
/// |j⟩|0⟩ → |j⟩|1⟩ otherwise; on |·⟩|1⟩ it acts as the inverse, so the
/// matrix is a self-adjoint unitary.
pub fn make_self_indicating_oracle(target: usize, regs: &Registers) -> Result<ComplexMatrix> {
    regs.check_arm(target)?;
    if !regs.reward_qubit {
        return Err(Error::Precondition("self-indicating oracle requires a success qubit".into()));
    }
    let phase = make_arm_oracle(target, Flip::Phase, regs)?;
    let mut flag = ComplexMatrix::zeros(regs.dim(), regs.dim());
    for a in 1..=regs.n_arms {
        write_arm_block(&mut flag, regs, a, Flip::Bit, &vec![true; regs.n_omega]);
    }
    Ok(flag.matmul(&phase))
}

/// The three access models for a bandit.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleKind {
    /// Reward-table unitary over arm ⊗ omega ⊗ reward registers.
    ErmUnitary(RewardTable),
    /// One sampled reward vector X_t per round, each realised as O_{X_t}.
    ReusableSample(Vec<Vec<bool>>),
    /// Channel ℱ_1^{p_1} ∘ … ∘ ℱ_N^{p_N}, fresh randomness on every call.
    OneTimeChannel(RewardVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleModel {
    pub kind: OracleKind,
    pub flip: Flip,
    pub regs: Registers,
}

impl OracleModel {
    pub fn erm(table: RewardTable) -> Self {
        let regs = super::table::erm_registers(&table);
        OracleModel { kind: OracleKind::ErmUnitary(table), flip: Flip::Bit, regs }
    }

    pub fn reusable(samples: Vec<Vec<bool>>, flip: Flip, regs: Registers) -> Self {
        OracleModel { kind: OracleKind::ReusableSample(samples), flip, regs }
    }

    pub fn one_time(rewards: RewardVector, flip: Flip, regs: Registers) -> Self {
        OracleModel { kind: OracleKind::OneTimeChannel(rewards), flip, regs }
    }

    pub fn dim(&self) -> usize {
        self.regs.dim()
    }
}
