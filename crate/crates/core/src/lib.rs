//! Dynamic tunneling global optimization for variational quantum eigensolvers.
//!
//! The crate is split into four layers:
//!
//! - [`qsim`]: dense statevector simulation, Pauli observables, Hilbert-Schmidt
//!   distance and adjoint gradients.
//! - [`model`]: transverse-field Ising Hamiltonians, the `Ry`/`CNOT` ansatz
//!   circuits and an exact-diagonalization reference.
//! - [`tunnel`]: gradient descent, FISTA, and the descend/tunnel loop with either
//!   a parameter-space or a state-space distance in the pole term.
//! - [`bench`]: the scalar demo landscape, seeded ensembles, revisit statistics
//!   and CSV output.

pub mod bench;
pub mod error;
pub mod model;
pub mod qsim;
pub mod tunnel;

pub use error::{Error, Result};
