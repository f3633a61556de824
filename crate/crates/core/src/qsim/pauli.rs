use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// One weighted Pauli string. Qubits absent from `ops` carry the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub ops: BTreeMap<usize, Pauli>,
}

impl PauliTerm {
    pub fn new(coeff: f64, ops: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        Self {
            coeff,
            ops: ops.into_iter().collect(),
        }
    }

    /// Number of Y factors; the string's matrix is real iff this is even.
    pub fn y_count(&self) -> usize {
        self.ops.values().filter(|&&p| p == Pauli::Y).count()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        for (q, p) in &self.ops {
            write!(f, "·{:?}{}", p, q)?;
        }
        Ok(())
    }
}

/// A real linear combination of Pauli strings on a fixed register. Hermitian by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for term in &terms {
            if !term.coeff.is_finite() {
                return Err(Error::Shape(format!("non-finite coefficient in {term}")));
            }
            if let Some((&q, _)) = term.ops.iter().next_back() {
                if q >= n_qubits {
                    return Err(Error::Index(format!(
                        "qubit {q} in {term} on a {n_qubits}-qubit register"
                    )));
                }
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// True when every string has an even number of Y factors, i.e. the operator
    /// is a real symmetric matrix in the computational basis.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.y_count() % 2 == 0)
    }
}

/// A `PauliSum` regrouped by bit-flip pattern: `O|i> = sum_g w_g[i] |i ^ flip_g>`.
///
/// Building one costs `O(#terms · 2^n)`; applying it costs `O(#groups · 2^n)`.
#[derive(Debug, Clone)]
pub struct CompiledObservable {
    n_qubits: usize,
    groups: Vec<(usize, Vec<Complex64>)>,
}

impl CompiledObservable {
    pub fn new(observable: &PauliSum) -> Self {
        let n = observable.n_qubits;
        let dim = 1usize << n;
        let mut groups: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
        for term in &observable.terms {
            let (mut flip, mut phase_mask) = (0usize, 0usize);
            for (&q, &p) in &term.ops {
                let bit = 1 << (n - 1 - q);
                match p {
                    Pauli::X => flip |= bit,
                    Pauli::Z => phase_mask |= bit,
                    Pauli::Y => {
                        flip |= bit;
                        phase_mask |= bit;
                    }
                }
            }
            // Y = i·X·Z on each qubit, so the string is i^ny · X^flip · Z^phase_mask.
            let global = Complex64::i().powu(term.y_count() as u32) * term.coeff;
            let weights = groups
                .entry(flip)
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim]);
            for (i, w) in weights.iter_mut().enumerate() {
                if (i & phase_mask).count_ones() % 2 == 0 {
                    *w += global;
                } else {
                    *w -= global;
                }
            }
        }
        Self {
            n_qubits: n,
            groups: groups.into_iter().collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `(flip mask, per-basis-state weight)` pairs.
    pub fn groups(&self) -> &[(usize, Vec<Complex64>)] {
        &self.groups
    }

    /// `O|psi>` as a raw (unnormalized) amplitude vector.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (flip, weights) in &self.groups {
            for (i, (&a, &w)) in amps.iter().zip(weights).enumerate() {
                out[i ^ flip] += w * a;
            }
        }
        out
    }

    /// `<psi|O|psi>` before discarding the imaginary part.
    pub fn expectation_complex(&self, state: &StateVector) -> Result<Complex64> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Shape(format!(
                "observable on {} qubits, state on {}",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        let amps = state.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for (flip, weights) in &self.groups {
            for (i, (&a, &w)) in amps.iter().zip(weights).enumerate() {
                acc += amps[i ^ flip].conj() * w * a;
            }
        }
        Ok(acc)
    }
}

/// `<psi|O|psi>`; real because `O` is Hermitian.
pub fn expectation(state: &StateVector, observable: &PauliSum) -> Result<f64> {
    Ok(CompiledObservable::new(observable)
        .expectation_complex(state)?
        .re)
}
