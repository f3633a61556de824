use crate::error::{Error, Result};
use crate::qsim::{adjoint_evaluate, Circuit, CompiledObservable, PauliSum, StateVector};

/// Opaque handle identifying "where" an evaluation happened, for use by a
/// [`DistanceMeasure`]. Always carries the parameters; quantum oracles also
/// attach the prepared state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateToken {
    params: Vec<f64>,
    state: Option<StateVector>,
}

impl StateToken {
    pub fn from_params(params: &[f64]) -> Self {
        Self {
            params: params.to_vec(),
            state: None,
        }
    }

    pub fn with_state(params: &[f64], state: StateVector) -> Self {
        Self {
            params: params.to_vec(),
            state: Some(state),
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn state(&self) -> Option<&StateVector> {
        self.state.as_ref()
    }
}

/// Cost value, gradient and token at one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub token: StateToken,
}

impl Evaluation {
    pub fn grad_norm(&self) -> f64 {
        norm(&self.gradient)
    }
}

/// A differentiable cost. Evaluation must be pure: equal inputs give equal
/// outputs, so one oracle can be shared across worker threads.
pub trait CostOracle: Sync {
    fn dimension(&self) -> usize;

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation>;
}

/// A metric between evaluation points, used in the pole term of the flow.
pub trait DistanceMeasure: Sync {
    fn distance(&self, a: &StateToken, b: &StateToken) -> f64;

    fn upper_bound(&self) -> Option<f64> {
        None
    }
}

/// `|x - y|_2` on the raw parameters.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl DistanceMeasure for Euclidean {
    fn distance(&self, a: &StateToken, b: &StateToken) -> f64 {
        a.params
            .iter()
            .zip(&b.params)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt()
    }
}

/// Hilbert-Schmidt distance between the prepared pure states.
///
/// Panics if either token lacks a state; pair it only with quantum oracles.
#[derive(Debug, Clone, Copy, Default)]
pub struct HilbertSchmidt;

impl DistanceMeasure for HilbertSchmidt {
    fn distance(&self, a: &StateToken, b: &StateToken) -> f64 {
        let (sa, sb) = match (&a.state, &b.state) {
            (Some(sa), Some(sb)) => (sa, sb),
            _ => panic!("Hilbert-Schmidt distance needs tokens from a quantum oracle"),
        };
        crate::qsim::hs_distance(sa, sb).expect("tokens from one oracle share a register")
    }

    fn upper_bound(&self) -> Option<f64> {
        Some(std::f64::consts::SQRT_2)
    }
}

/// `f(x) = <0|U(x)† H U(x)|0>` with adjoint gradients.
#[derive(Debug, Clone)]
pub struct VqeOracle {
    circuit: Circuit,
    observable: CompiledObservable,
}

impl VqeOracle {
    pub fn new(circuit: Circuit, hamiltonian: &PauliSum) -> Result<Self> {
        if circuit.n_qubits() != hamiltonian.n_qubits() {
            return Err(Error::Shape(format!(
                "circuit on {} qubits, Hamiltonian on {}",
                circuit.n_qubits(),
                hamiltonian.n_qubits()
            )));
        }
        Ok(Self {
            circuit,
            observable: CompiledObservable::new(hamiltonian),
        })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }
}

impl CostOracle for VqeOracle {
    fn dimension(&self) -> usize {
        self.circuit.n_params()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        let eval = adjoint_evaluate(&self.circuit, x, &self.observable)?;
        Ok(Evaluation {
            value: eval.value,
            gradient: eval.gradient,
            token: StateToken::with_state(x, eval.state),
        })
    }
}

/// Wraps a closure returning `(value, gradient)`; tokens carry only `x`.
pub struct FnOracle<F> {
    dimension: usize,
    f: F,
}

impl<F> FnOracle<F>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>) + Sync,
{
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F> CostOracle for FnOracle<F>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>) + Sync,
{
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        if x.len() != self.dimension {
            return Err(Error::Arity {
                expected: self.dimension,
                got: x.len(),
            });
        }
        let (value, gradient) = (self.f)(x);
        Ok(Evaluation {
            value,
            gradient,
            token: StateToken::from_params(x),
        })
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
