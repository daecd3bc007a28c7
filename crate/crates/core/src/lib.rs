//! Purification attacks on quantum bit commitment protocols in which Bob
//! draws his actions from a secret probability distribution.
//!
//! The crate builds the honest committed states of a protocol, computes
//! Uhlmann fidelities and Alice-local cheating unitaries, synthesizes the
//! distribution-independent cheating unitary from the uniform purification
//! over point-mass distributions, and checks the resulting success bounds.

pub mod attack;
pub mod error;
pub mod experiment;
pub mod fidelity;
pub mod hilbert;
pub mod protocol;
pub mod random;

pub use error::{Error, Result};
