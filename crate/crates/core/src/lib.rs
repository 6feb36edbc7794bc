//! Simulation and analysis of teleportation-based multi-party quantum
//! summation.
//!
//! A third party threads `L` chains of Bell pairs through `n` participants
//! and back to itself. Each participant flips the teleported state with
//! `U = ZX` when its private bit is 1; the third party undoes the known Pauli
//! residuals and reads the XOR of all private bits off the returned state.
//!
//! * [`algebra`]: Bell labels, Pauli operators, prepared states.
//! * [`statevector`]: dense ground-truth backend.
//! * [`protocol`]: the honest protocol, step by step.
//! * [`adversary`]: attacks by the third party, outsiders and colluders.

pub mod adversary;
pub mod algebra;
pub mod protocol;
pub mod rng;
pub mod statevector;
pub mod stats;

pub use algebra::{BellLabel, Bit, MeasBasis, Parity, PauliOp, PreparedState};
pub use protocol::{Backend, ProtocolConfig, ProtocolError, SecretInputs};
pub use rng::RunRng;
