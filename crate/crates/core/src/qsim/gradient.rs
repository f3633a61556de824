//! Gradients of `f(x) = <0|U(x)† O U(x)|0>`.
//!
//! [`cost_and_gradient`] uses the adjoint (reverse) sweep: one forward pass to
//! build the final state, then one backward pass that un-applies each gate to
//! both the state and the co-state `O|psi>`. [`parameter_shift_gradient`] is the
//! independent cross-check; it is exact for `Ry` generators.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::circuit::{cnot_in_place, ry_in_place, run_circuit, Circuit, Gate};
use super::pauli::{CompiledObservable, PauliSum};
use super::state::StateVector;
use crate::error::{Error, Result};

/// Value, gradient and the prepared state at one parameter point.
#[derive(Debug, Clone)]
pub struct AdjointEvaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub state: StateVector,
}

pub fn cost_and_gradient(
    circuit: &Circuit,
    params: &[f64],
    observable: &PauliSum,
) -> Result<(f64, Vec<f64>)> {
    let eval = adjoint_evaluate(circuit, params, &CompiledObservable::new(observable))?;
    Ok((eval.value, eval.gradient))
}

pub fn adjoint_evaluate(
    circuit: &Circuit,
    params: &[f64],
    observable: &CompiledObservable,
) -> Result<AdjointEvaluation> {
    if observable.n_qubits() != circuit.n_qubits() {
        return Err(Error::Shape(format!(
            "observable on {} qubits, circuit on {}",
            observable.n_qubits(),
            circuit.n_qubits()
        )));
    }
    let final_state = run_circuit(circuit, params)?;
    let co_amps = observable.apply(final_state.amplitudes());
    let value = final_state
        .amplitudes()
        .iter()
        .zip(&co_amps)
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .re;

    // The co-state is not normalized, so carry it as a raw StateVector.
    let mut psi = final_state.clone();
    let mut lam = raw_state(circuit.n_qubits(), co_amps);
    let mut gradient = vec![0.0; circuit.n_params()];

    for &gate in circuit.gates().iter().rev() {
        match gate {
            Gate::Ry { qubit, slot } => {
                gradient[slot] = ry_derivative_overlap(&lam, &psi, qubit);
                ry_in_place(&mut psi, qubit, -params[slot]);
                ry_in_place(&mut lam, qubit, -params[slot]);
            }
            Gate::Cnot { control, target } => {
                cnot_in_place(&mut psi, control, target);
                cnot_in_place(&mut lam, control, target);
            }
        }
    }

    Ok(AdjointEvaluation {
        value,
        gradient,
        state: final_state,
    })
}

/// `Re <lam| (-iY)_q |psi>`, where `-iY = [[0, -1], [1, 0]]`.
fn ry_derivative_overlap(lam: &StateVector, psi: &StateVector, qubit: usize) -> f64 {
    let mask = psi.mask(qubit);
    let (l, p) = (lam.amplitudes(), psi.amplitudes());
    let mut acc = 0.0;
    for i in 0..p.len() {
        if i & mask == 0 {
            let j = i | mask;
            acc += (l[i].conj() * -p[j] + l[j].conj() * p[i]).re;
        }
    }
    acc
}

fn raw_state(n_qubits: usize, amps: Vec<Complex64>) -> StateVector {
    let mut s = StateVector::zero(n_qubits).expect("register already validated");
    s.amplitudes_mut().copy_from_slice(&amps);
    s
}

/// `[f(x + pi/2 e_i) - f(x - pi/2 e_i)] / 2` for every parameter.
pub fn parameter_shift_gradient(
    circuit: &Circuit,
    params: &[f64],
    observable: &PauliSum,
) -> Result<Vec<f64>> {
    circuit.check_arity(params)?;
    let compiled = CompiledObservable::new(observable);
    let f = |x: &[f64]| -> Result<f64> {
        Ok(compiled
            .expectation_complex(&run_circuit(circuit, x)?)?
            .re)
    };
    let mut shifted = params.to_vec();
    (0..params.len())
        .map(|i| {
            shifted[i] = params[i] + FRAC_PI_2;
            let plus = f(&shifted)?;
            shifted[i] = params[i] - FRAC_PI_2;
            let minus = f(&shifted)?;
            shifted[i] = params[i];
            Ok((plus - minus) / 2.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{Pauli, PauliTerm};
    use std::f64::consts::FRAC_PI_2;

    fn ry_vs_z() -> (Circuit, PauliSum) {
        (
            Circuit::new(1, vec![Gate::Ry { qubit: 0, slot: 0 }]).unwrap(),
            PauliSum::new(1, vec![PauliTerm::new(1.0, [(0, Pauli::Z)])]).unwrap(),
        )
    }

    #[test]
    fn single_qubit_closed_form() {
        let (c, z) = ry_vs_z();
        let (value, grad) = cost_and_gradient(&c, &[FRAC_PI_2], &z).unwrap();
        assert!(value.abs() < 1e-15);
        assert!((grad[0] + 1.0).abs() < 1e-15);
        for phi in [-2.0, 0.3, 1.7, 5.0] {
            let (v, g) = cost_and_gradient(&c, &[phi], &z).unwrap();
            assert!((v - f64::cos(phi)).abs() < 1e-14);
            assert!((g[0] + f64::sin(phi)).abs() < 1e-14);
        }
    }

    #[test]
    fn parameter_shift_closed_form() {
        let (c, z) = ry_vs_z();
        assert!(parameter_shift_gradient(&c, &[0.0], &z).unwrap()[0].abs() < 1e-15);
        let g = parameter_shift_gradient(&c, &[FRAC_PI_2], &z).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn stationary_point_has_zero_gradient() {
        // Every angle at 0 or pi keeps the state a basis vector, which is a
        // stationary point of any Z-diagonal objective.
        let c = Circuit::new(
            2,
            vec![
                Gate::Ry { qubit: 0, slot: 0 },
                Gate::Ry { qubit: 1, slot: 1 },
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
            ],
        )
        .unwrap();
        let zz = PauliSum::new(
            2,
            vec![PauliTerm::new(1.0, [(0, Pauli::Z), (1, Pauli::Z)])],
        )
        .unwrap();
        let (_, g) = cost_and_gradient(&c, &[std::f64::consts::PI, 0.0], &zz).unwrap();
        assert!(g.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-8);
    }

    #[test]
    fn arity_errors() {
        let (c, z) = ry_vs_z();
        assert!(matches!(
            cost_and_gradient(&c, &[], &z),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            parameter_shift_gradient(&c, &[0.0, 0.0], &z),
            Err(Error::Arity { .. })
        ));
    }
}
