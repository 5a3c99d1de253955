//! Exact simulation of quantum multi-armed-bandit oracles and numerical
//! verification of the fidelity, purity and coupling bounds used in their
//! query lower bounds.
//!
//! Modules are layered bottom-up: [`qmat`] (dense linear algebra and
//! distance measures), [`oracles`], [`simulator`], [`algorithms`] and
//! [`bounds`].

pub mod algorithms;
pub mod bounds;
pub mod error;
pub mod oracles;
pub mod qmat;
pub mod rng;
pub mod simulator;
pub mod tol;

pub use error::{Error, Result};
