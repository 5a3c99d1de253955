//! Bandit oracle models: per-arm flip unitaries, reusable sample oracles,
//! the ERM reward-table oracle and the one-time oracle channel.

mod channel;
mod reward;
mod table;
mod unitary;

pub use channel::{make_channel_e, make_channel_f, ArmChannel, KrausChannel, OneTimeChannel, EXPLICIT_MIXTURE_CAP};
pub use reward::{RewardFamily, RewardVector};
pub use table::{erm_registers, make_erm_oracle, sample_coupled_tables, difference_projector, RewardTable};
pub use unitary::{
    arm_projector, make_arm_oracle, make_ox, make_self_indicating_oracle, Flip, OracleKind, OracleModel, Registers,
};
