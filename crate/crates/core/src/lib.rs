//! Probabilistic encoding of two non-entangled qubits into a single qutrit.
//!
//! A four-outcome projective measurement on `ancilla ⊗ |ψ₁⟩|ψ₂⟩` leaves a
//! qutrit plus two classical bits. Later, either qubit (chosen freely) can be
//! reconstructed exactly with probability 2/3 on average; on failure the qutrit
//! collapses to a single level.
//!
//! The crate is organised in layers:
//!
//! - [`state`]: pure states, diagonal projectors, permutations, fidelity.
//! - [`protocol`]: the encoder and decoder, both as closed forms and as the
//!   explicit 12-dimensional pipeline.
//! - [`quadrature`] and [`bayes`]: posteriors over the Bloch polar angles and
//!   the information gained at each stage, in bits.
//! - [`mc`]: seeded, thread-count independent Monte Carlo runs.
//! - [`report`]: the documents behind the `qutrit-codec` binary.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod bayes;
pub mod error;
pub mod mc;
pub mod protocol;
pub mod quadrature;
pub mod report;
pub mod state;

pub use error::{Error, Result};
pub use protocol::{BlochAngles, Outcome, QubitPair, Target};
pub use quadrature::Quadrature;
pub use state::PureState;
