//! Standard one-qubit teleportation through a two-qubit Heisenberg XY channel
//! whose state decoheres under a Lindblad master equation.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: fixed-size complex matrices, Pauli and Bell constants, qubit
//!   states and Bloch vectors.
//! - [`dynamics`]: the XY Hamiltonian, the Lindblad generator for the
//!   dissipative, noisy and dephasing environments, an RK4 integrator and the
//!   closed-form X-state propagators.
//! - [`metrics`]: concurrence and purity of the channel state.
//! - [`teleport`]: Bell overlaps, output states, fidelities, fully entangled
//!   fraction and Bloch-sphere shrink factors.
//! - [`explab`]: parameter sweeps, critical-time search, Bloch mesh export and
//!   the `telechan` command line.

pub mod dynamics;
pub mod error;
pub mod explab;
pub mod metrics;
pub mod qcore;
pub mod teleport;

pub use error::{Error, Result};
