//! Quantum kicked top restricted to the permutation-symmetric subspace of
//! `2j` qubits, with the correlation measures used to compare long-time
//! quantum behaviour against classical phase-space structure.

pub mod error;
pub mod cli;
pub mod correlations;
pub mod kicked_top;
pub mod numerics;
pub mod reductions;
pub mod spin;
pub mod survey;
pub mod verify;

pub use error::{Error, Result};
