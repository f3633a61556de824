//! Transverse-field Ising Hamiltonians, matching `Ry`/`CNOT` ansatz circuits,
//! and a dense exact-diagonalization reference.
//!
//! Both lattices use open boundaries. Grid sites are indexed row-major, so site
//! `(r, c)` on a `rows x cols` lattice is qubit `r * cols + c`.

use faer::{c64, Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{Circuit, CompiledObservable, Gate, Pauli, PauliSum, PauliTerm, MAX_QUBITS};

/// Largest register [`exact_ground_energy`] will diagonalize densely.
pub const MAX_EXACT_QUBITS: usize = 14;

/// Open chain `H = J Σ Z_j Z_{j+1} + B Σ X_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub j: f64,
    pub b: f64,
}

/// Open `rows x cols` square lattice with the same couplings as [`ChainSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub j: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    Chain(usize),
    Grid { rows: usize, cols: usize },
}

/// An ansatz shape: `n_blocks` repetitions of an `Ry` layer followed by the
/// topology's entangling pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub topology: Topology,
    pub n_blocks: usize,
}

impl AnsatzSpec {
    pub fn n_qubits(&self) -> usize {
        match self.topology {
            Topology::Chain(n) => n,
            Topology::Grid { rows, cols } => rows * cols,
        }
    }

    pub fn n_params(&self) -> usize {
        self.n_blocks * self.n_qubits()
    }

    pub fn build(&self) -> Result<Circuit> {
        match self.topology {
            Topology::Chain(n) => ansatz_chain(n, self.n_blocks),
            Topology::Grid { rows, cols } => ansatz_grid(rows, cols, self.n_blocks),
        }
    }
}

fn check_couplings(j: f64, b: f64) -> Result<()> {
    if !(j.is_finite() && b.is_finite()) {
        return Err(Error::Config(format!("non-finite couplings J={j}, B={b}")));
    }
    Ok(())
}

fn zz(j: f64, a: usize, b: usize) -> PauliTerm {
    PauliTerm::new(j, [(a, Pauli::Z), (b, Pauli::Z)])
}

fn x_field(n: usize, b: f64) -> impl Iterator<Item = PauliTerm> {
    (0..n).map(move |q| PauliTerm::new(b, [(q, Pauli::X)]))
}

/// Open-boundary Ising chain. The `X` terms are omitted when `B == 0`.
pub fn tfim_chain(spec: ChainSpec) -> Result<PauliSum> {
    let n = spec.n_sites;
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::Config(format!(
            "chain length {n} outside 2..={MAX_QUBITS}"
        )));
    }
    check_couplings(spec.j, spec.b)?;
    let mut terms: Vec<PauliTerm> = (0..n - 1).map(|q| zz(spec.j, q, q + 1)).collect();
    if spec.b != 0.0 {
        terms.extend(x_field(n, spec.b));
    }
    PauliSum::new(n, terms)
}

/// Nearest-neighbour bonds of an open `rows x cols` lattice, horizontal bonds
/// first, each as `(left/upper, right/lower)`.
pub fn grid_bonds(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let site = |r: usize, c: usize| r * cols + c;
    let horizontal = (0..rows).flat_map(move |r| (0..cols - 1).map(move |c| (site(r, c), site(r, c + 1))));
    let vertical = (0..rows - 1).flat_map(move |r| (0..cols).map(move |c| (site(r, c), site(r + 1, c))));
    horizontal.chain(vertical).collect()
}

/// Open-boundary Ising model on a square lattice.
pub fn tfim_grid(spec: GridSpec) -> Result<PauliSum> {
    let (rows, cols) = (spec.rows, spec.cols);
    if rows < 2 || cols < 2 || rows * cols > MAX_QUBITS {
        return Err(Error::Config(format!(
            "grid {rows}x{cols} needs rows, cols >= 2 and at most {MAX_QUBITS} sites"
        )));
    }
    check_couplings(spec.j, spec.b)?;
    let n = rows * cols;
    let mut terms: Vec<PauliTerm> = grid_bonds(rows, cols)
        .into_iter()
        .map(|(a, b)| zz(spec.j, a, b))
        .collect();
    if spec.b != 0.0 {
        terms.extend(x_field(n, spec.b));
    }
    PauliSum::new(n, terms)
}

fn ry_layer(gates: &mut Vec<Gate>, n_qubits: usize, block: usize) {
    gates.extend((0..n_qubits).map(|q| Gate::Ry {
        qubit: q,
        slot: block * n_qubits + q,
    }));
}

/// Even-bond CNOT column then odd-bond column along every line in `lines`,
/// controls on the lower index. All lines share the two columns.
fn ladder(gates: &mut Vec<Gate>, lines: &[Vec<usize>]) {
    for parity in [0, 1] {
        for line in lines {
            gates.extend(line.windows(2).skip(parity).step_by(2).map(|w| Gate::Cnot {
                control: w[0],
                target: w[1],
            }));
        }
    }
}

/// Chain ansatz: per block an `Ry` layer, CNOTs on bonds `(0,1), (2,3), ...`, then
/// on bonds `(1,2), (3,4), ...`.
pub fn ansatz_chain(n_qubits: usize, n_blocks: usize) -> Result<Circuit> {
    if !(2..=MAX_QUBITS).contains(&n_qubits) || n_blocks == 0 {
        return Err(Error::Config(format!(
            "chain ansatz needs 2..={MAX_QUBITS} qubits and at least one block, got {n_qubits} qubits, {n_blocks} blocks"
        )));
    }
    let line = vec![(0..n_qubits).collect::<Vec<_>>()];
    let mut gates = Vec::new();
    for block in 0..n_blocks {
        ry_layer(&mut gates, n_qubits, block);
        ladder(&mut gates, &line);
    }
    Circuit::new(n_qubits, gates)
}

/// Grid ansatz: per block an `Ry` layer, the chain ladder inside every row, then
/// vertical CNOTs `(r, c) -> (r + 1, c)` row pair by row pair, left to right.
pub fn ansatz_grid(rows: usize, cols: usize, n_blocks: usize) -> Result<Circuit> {
    if rows < 2 || cols < 2 || rows * cols > MAX_QUBITS || n_blocks == 0 {
        return Err(Error::Config(format!(
            "grid ansatz needs rows, cols >= 2, at most {MAX_QUBITS} sites and a block, got {rows}x{cols}, {n_blocks} blocks"
        )));
    }
    let n = rows * cols;
    let row_lines: Vec<Vec<usize>> = (0..rows)
        .map(|r| (0..cols).map(|c| r * cols + c).collect())
        .collect();
    let mut gates = Vec::new();
    for block in 0..n_blocks {
        ry_layer(&mut gates, n, block);
        ladder(&mut gates, &row_lines);
        for r in 0..rows - 1 {
            gates.extend((0..cols).map(|c| Gate::Cnot {
                control: r * cols + c,
                target: (r + 1) * cols + c,
            }));
        }
    }
    Circuit::new(n, gates)
}

/// Dense row-major matrix of `observable` in the computational basis.
pub fn dense_matrix(observable: &PauliSum) -> Result<Vec<Complex64>> {
    let n = observable.n_qubits();
    check_exact_size(n)?;
    let dim = 1usize << n;
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for_each_entry(observable, |row, col, w| m[row * dim + col] += w);
    Ok(m)
}

fn check_exact_size(n: usize) -> Result<()> {
    if n > MAX_EXACT_QUBITS {
        return Err(Error::Size(format!(
            "dense diagonalization limited to {MAX_EXACT_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

fn for_each_entry(observable: &PauliSum, mut f: impl FnMut(usize, usize, Complex64)) {
    // O|i> = sum_g w_g[i] |i ^ flip_g>, so w_g[i] sits at row i ^ flip_g, column i.
    for (flip, weights) in CompiledObservable::new(observable).groups() {
        for (col, &w) in weights.iter().enumerate() {
            if w.re != 0.0 || w.im != 0.0 {
                f(col ^ flip, col, w);
            }
        }
    }
}

/// Smallest eigenvalue of `observable`, by a dense Hermitian eigensolve.
///
/// Uses a real symmetric solve when no string carries an odd number of `Y`s.
pub fn exact_ground_energy(observable: &PauliSum) -> Result<f64> {
    let n = observable.n_qubits();
    check_exact_size(n)?;
    let dim = 1usize << n;
    let eigenvalues: Vec<f64> = if observable.is_real() {
        let mut m = Mat::<f64>::zeros(dim, dim);
        for_each_entry(observable, |r, c, w| m[(r, c)] += w.re);
        m.self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numeric {
                phase: "exact",
                iteration: 0,
                detail: format!("{e:?}"),
            })?
    } else {
        let mut m = Mat::<c64>::zeros(dim, dim);
        for_each_entry(observable, |r, c, w| m[(r, c)] += c64::new(w.re, w.im));
        m.self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numeric {
                phase: "exact",
                iteration: 0,
                detail: format!("{e:?}"),
            })?
    };
    eigenvalues
        .into_iter()
        .reduce(f64::min)
        .ok_or_else(|| Error::Size("empty spectrum".into()))
}
