use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension cap exceeded: {0} > {1}")]
    DimensionCap(usize, usize),
    #[error("hermitian check failed: deviation {0:e}")]
    NotHermitian(f64),
    #[error("dim mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid pure state: norm {0}")]
    InvalidPureState(f64),
    #[error("negative eigenvalue {0:e} below clamp tolerance")]
    NegativeEigenvalue(f64),
    #[error("bad subsystem spec: {0}")]
    BadSubsystem(String),
    #[error("arm {0} out of range 1..={1}")]
    ArmOutOfRange(usize, usize),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("mean {0} outside [eta, 1 - eta] with eta = {1}")]
    EtaBand(f64, f64),
    #[error("table size incompatible with means: {0}")]
    TableSize(String),
    #[error("use sequential composition: {0} arms exceed the explicit mixture cap {1}")]
    UseSequential(usize, usize),
    #[error("best arm not unique")]
    BestArmNotUnique,
    #[error("bound undefined/vacuous for p = {0}")]
    BoundUndefined(f64),
    #[error("projector/operator incompatible: residual {0:e}")]
    ProjectorIncompatible(f64),
    #[error("perturbation too large: minimum eigenvalue {0:e}")]
    PerturbationTooLarge(f64),
    #[error("numerical blowup: trace drift {0:e}")]
    NumericalBlowup(f64),
    #[error("incomplete projector set: residual {0:e}")]
    IncompleteProjectors(f64),
    #[error("oracle never fires")]
    OracleNeverFires,
    #[error("no flagged arm found")]
    NoFlaggedArm,
    #[error("history cap exceeded: {0}")]
    HistoryCap(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}
