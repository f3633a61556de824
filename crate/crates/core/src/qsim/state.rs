use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the dense simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// A normalized pure state over `2^n_qubits` computational basis states.
///
/// Qubit 0 is the most significant bit of the basis index, so `|q0 q1 ... q_{n-1}>`
/// reads left to right as a binary number.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes, normalizing them. Fails if the length is not a
    /// power of two or the vector has zero norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Size(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_register(n_qubits)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Size("state has zero or non-finite norm".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit mask selecting `qubit` within a basis index.
    pub(crate) fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        same_register(self, other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies every amplitude by `phase`, which should have unit modulus.
    pub fn with_global_phase(mut self, phase: Complex64) -> Self {
        for a in &mut self.amps {
            *a *= phase;
        }
        self
    }
}

/// `zero_state` from the operation list: `|0...0>` on `n_qubits` qubits.
pub fn zero_state(n_qubits: usize) -> Result<StateVector> {
    StateVector::zero(n_qubits)
}

/// `|<a|b>|^2`, clamped into `[0, 1]`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Hilbert-Schmidt distance between the pure states `|a><a|` and `|b><b|`,
/// `sqrt(2 - 2 |<a|b>|^2)`, bounded by `sqrt(2)`.
///
/// Evaluated as `sqrt(|e^{iφ} a - b|^2 (1 + |<a|b>|))` with `φ = arg <a|b>`,
/// which stays accurate when the states nearly coincide.
pub fn hs_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = a.inner(b)?;
    let modulus = overlap.norm();
    let phase = if modulus > 0.0 { overlap / modulus } else { Complex64::new(1.0, 0.0) };
    let gap: f64 = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x * phase - y).norm_sqr())
        .sum();
    Ok((gap * (1.0 + modulus.min(1.0))).sqrt().min(std::f64::consts::SQRT_2))
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Size(format!(
            "register of {n_qubits} qubits outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn same_register(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::Shape(format!(
            "states on {} and {} qubits",
            a.n_qubits, b.n_qubits
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus() -> StateVector {
        StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap()
    }

    #[test]
    fn zero_state_layout() {
        assert_eq!(zero_state(1).unwrap().amplitudes(), &[c(1.0), c(0.0)]);
        assert_eq!(
            zero_state(2).unwrap().amplitudes(),
            &[c(1.0), c(0.0), c(0.0), c(0.0)]
        );
    }

    #[test]
    fn zero_state_guard() {
        assert!(matches!(zero_state(25), Err(Error::Size(_))));
        assert!(matches!(zero_state(0), Err(Error::Size(_))));
        assert!(zero_state(MAX_QUBITS).is_ok());
    }

    #[test]
    fn fidelity_examples() {
        let zero = zero_state(1).unwrap();
        let one = StateVector::from_amplitudes(vec![c(0.0), c(1.0)]).unwrap();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&zero, &plus()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hs_distance_examples() {
        let zero = zero_state(1).unwrap();
        let one = StateVector::from_amplitudes(vec![c(0.0), c(1.0)]).unwrap();
        assert_eq!(hs_distance(&zero, &zero).unwrap(), 0.0);
        assert!((hs_distance(&zero, &one).unwrap() - SQRT_2).abs() < 1e-15);
        assert!((hs_distance(&zero, &plus()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_registers_are_rejected() {
        let a = zero_state(1).unwrap();
        let b = zero_state(2).unwrap();
        assert!(matches!(fidelity(&a, &b), Err(Error::Shape(_))));
        assert!(matches!(hs_distance(&a, &b), Err(Error::Shape(_))));
    }
}
