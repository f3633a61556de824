use super::state::StateVector;
use crate::error::{Error, Result};

/// The two gates the ansatz circuits need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// `exp(-i·Y·phi/2)` with `phi = params[slot]`.
    Ry { qubit: usize, slot: usize },
    Cnot { control: usize, target: usize },
}

/// An ordered gate list acting on `|0...0>`. Every parameter slot in
/// `0..n_params` drives exactly one `Ry`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut slot_uses = Vec::new();
        for gate in &gates {
            match *gate {
                Gate::Ry { qubit, slot } => {
                    check_qubit(qubit, n_qubits)?;
                    if slot >= slot_uses.len() {
                        slot_uses.resize(slot + 1, 0usize);
                    }
                    slot_uses[slot] += 1;
                }
                Gate::Cnot { control, target } => {
                    check_qubit(control, n_qubits)?;
                    check_qubit(target, n_qubits)?;
                    if control == target {
                        return Err(Error::Index(format!(
                            "CNOT control and target are both qubit {control}"
                        )));
                    }
                }
            }
        }
        if let Some(slot) = slot_uses.iter().position(|&uses| uses != 1) {
            return Err(Error::Index(format!(
                "parameter slot {slot} drives {} rotations, expected exactly one",
                slot_uses[slot]
            )));
        }
        Ok(Self {
            n_qubits,
            n_params: slot_uses.len(),
            gates,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn count_ry(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Ry { .. }))
            .count()
    }

    pub fn count_cnot(&self) -> usize {
        self.gates.len() - self.count_ry()
    }

    pub(crate) fn check_arity(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::Arity {
                expected: self.n_params,
                got: params.len(),
            });
        }
        Ok(())
    }
}

fn check_qubit(qubit: usize, n_qubits: usize) -> Result<()> {
    if qubit >= n_qubits {
        return Err(Error::Index(format!(
            "qubit {qubit} on a {n_qubits}-qubit register"
        )));
    }
    Ok(())
}

/// Applies `gate` in place. Rotation angles are read from `params`.
pub fn apply_gate(state: &mut StateVector, gate: Gate, params: &[f64]) -> Result<()> {
    let n = state.n_qubits();
    match gate {
        Gate::Ry { qubit, slot } => {
            check_qubit(qubit, n)?;
            let angle = *params.get(slot).ok_or_else(|| {
                Error::Index(format!(
                    "parameter slot {slot} with {} parameters",
                    params.len()
                ))
            })?;
            ry_in_place(state, qubit, angle);
        }
        Gate::Cnot { control, target } => {
            check_qubit(control, n)?;
            check_qubit(target, n)?;
            if control == target {
                return Err(Error::Index(format!(
                    "CNOT control and target are both qubit {control}"
                )));
            }
            cnot_in_place(state, control, target);
        }
    }
    Ok(())
}

pub(crate) fn ry_in_place(state: &mut StateVector, qubit: usize, angle: f64) {
    let mask = state.mask(qubit);
    let (s, c) = (angle / 2.0).sin_cos();
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & mask == 0 {
            let (a0, a1) = (amps[i], amps[i | mask]);
            amps[i] = a0 * c - a1 * s;
            amps[i | mask] = a0 * s + a1 * c;
        }
    }
}

pub(crate) fn cnot_in_place(state: &mut StateVector, control: usize, target: usize) {
    let (cmask, tmask) = (state.mask(control), state.mask(target));
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & cmask != 0 && i & tmask == 0 {
            amps.swap(i, i | tmask);
        }
    }
}

/// `U(params)|0...0>`.
pub fn run_circuit(circuit: &Circuit, params: &[f64]) -> Result<StateVector> {
    circuit.check_arity(params)?;
    let mut state = StateVector::zero(circuit.n_qubits)?;
    for &gate in &circuit.gates {
        apply_gate(&mut state, gate, params)?;
    }
    Ok(state)
}
