//! Fourier series of Clifford+Pauli variational loss functions.
//!
//! A circuit in Pauli form `(P_1 … P_M | H)` has loss
//! `F(φ) = ⟨0| U†(φ) H U(φ) |0⟩` with `U(φ) = ∏ exp(-i φ_m P_m / 2)`. The
//! [`expansion`] engine computes its trigonometric series exactly by
//! conjugating `H` through the generators one at a time, discarding branches
//! whose expectation in `|0…0⟩` is provably zero.

pub mod circuit;
pub mod error;
pub mod expansion;
pub mod mq;
pub mod oracle;
pub mod pauli;
pub mod series;
pub mod stats;

#[cfg(test)]
mod testutil;

pub use circuit::{Observable, PauliCircuit};
pub use error::{Error, Result};
pub use expansion::{expand, expand_pauli, ExpansionOptions, ExpansionReport, Reorder};
pub use pauli::{BitVec, Gf2Basis, PauliOperator};
pub use series::{Factor, FourierSeries, LevelStats, MonomialKey};
