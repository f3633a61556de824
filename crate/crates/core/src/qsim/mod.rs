//! Dense statevector simulation of `Ry`/`CNOT` circuits.
//!
//! States are pure and stored as `2^n` complex amplitudes with qubit 0 as the
//! most significant bit of the basis index.

mod circuit;
mod gradient;
mod pauli;
mod state;

pub use circuit::{apply_gate, run_circuit, Circuit, Gate};
pub use gradient::{
    adjoint_evaluate, cost_and_gradient, parameter_shift_gradient, AdjointEvaluation,
};
pub use pauli::{expectation, CompiledObservable, Pauli, PauliSum, PauliTerm};
pub use state::{fidelity, hs_distance, zero_state, StateVector, MAX_QUBITS};
