//! Cross-checks the three gradient routes on the reference ansatz circuits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::error::Result;
use crate::model::{ansatz_chain, ansatz_grid, tfim_chain, tfim_grid, ChainSpec, GridSpec};
use crate::qsim::{cost_and_gradient, expectation, parameter_shift_gradient, run_circuit, Circuit, PauliSum};

/// Step for the central finite differences.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct GradCheckCase {
    pub name: String,
    pub draws: usize,
    pub max_adjoint_vs_shift: f64,
    pub max_adjoint_vs_fd: f64,
    pub max_shift_vs_fd: f64,
}

impl GradCheckCase {
    pub fn max_deviation(&self) -> f64 {
        self.max_adjoint_vs_shift
            .max(self.max_adjoint_vs_fd)
            .max(self.max_shift_vs_fd)
    }
}

pub fn central_difference(circuit: &Circuit, x: &[f64], observable: &PauliSum, h: f64) -> Result<Vec<f64>> {
    let mut xs = x.to_vec();
    (0..x.len())
        .map(|i| {
            xs[i] = x[i] + h;
            let plus = expectation(&run_circuit(circuit, &xs)?, observable)?;
            xs[i] = x[i] - h;
            let minus = expectation(&run_circuit(circuit, &xs)?, observable)?;
            xs[i] = x[i];
            Ok((plus - minus) / (2.0 * h))
        })
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn check_circuit(
    name: &str,
    circuit: &Circuit,
    observable: &PauliSum,
    draws: usize,
    seed: u64,
) -> Result<GradCheckCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut case = GradCheckCase {
        name: name.to_string(),
        draws,
        max_adjoint_vs_shift: 0.0,
        max_adjoint_vs_fd: 0.0,
        max_shift_vs_fd: 0.0,
    };
    for _ in 0..draws {
        let x: Vec<f64> = (0..circuit.n_params()).map(|_| rng.gen_range(0.0..TAU)).collect();
        let (_, adjoint) = cost_and_gradient(circuit, &x, observable)?;
        let shift = parameter_shift_gradient(circuit, &x, observable)?;
        let fd = central_difference(circuit, &x, observable, FD_STEP)?;
        case.max_adjoint_vs_shift = case.max_adjoint_vs_shift.max(max_abs_diff(&adjoint, &shift));
        case.max_adjoint_vs_fd = case.max_adjoint_vs_fd.max(max_abs_diff(&adjoint, &fd));
        case.max_shift_vs_fd = case.max_shift_vs_fd.max(max_abs_diff(&shift, &fd));
    }
    Ok(case)
}

/// The 5-site chain and 2x4 grid ansatzes, two blocks each, against their
/// Ising Hamiltonians.
pub fn gradcheck_suite(draws: usize, seed: u64) -> Result<Vec<GradCheckCase>> {
    let chain = tfim_chain(ChainSpec { n_sites: 5, j: 1.0, b: 5.0 })?;
    let grid = tfim_grid(GridSpec { rows: 2, cols: 4, j: 1.0, b: 5.0 })?;
    Ok(vec![
        check_circuit("chain 5, 2 blocks", &ansatz_chain(5, 2)?, &chain, draws, seed)?,
        check_circuit("grid 2x4, 2 blocks", &ansatz_grid(2, 4, 2)?, &grid, draws, seed.wrapping_add(1))?,
    ])
}
