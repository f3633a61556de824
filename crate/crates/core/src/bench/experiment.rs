use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::records::{HistogramRecord, ProfileRecord};
use super::toy::{ToyOracle, TOY_PERIOD};
use crate::error::{Error, Result};
use crate::model::{tfim_chain, tfim_grid, AnsatzSpec, ChainSpec, GridSpec, Topology};
use crate::tunnel::{
    dynamic_tunneling, Clamp, CostOracle, DescentKind, DistanceMeasure, Euclidean, HilbertSchmidt,
    TunnelConfig, TunnelRun, VqeOracle,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Toy,
    Chain,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DescentOnly,
    /// Euclidean distance on the parameters.
    TunnelConventional,
    /// Hilbert-Schmidt distance on the prepared states.
    TunnelModified,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::DescentOnly => "descent_only",
            Method::TunnelConventional => "tunnel_conventional",
            Method::TunnelModified => "tunnel_modified",
        }
    }
}

fn default_j() -> f64 {
    1.0
}
fn default_k() -> f64 {
    TunnelConfig::default().k
}
fn default_lambda_multiplier() -> f64 {
    TunnelConfig::default().lambda_multiplier
}
fn default_learning_rate() -> f64 {
    TunnelConfig::default().learning_rate
}
fn default_grad_tol() -> f64 {
    TunnelConfig::default().grad_tol
}
fn default_escape_margin() -> f64 {
    TunnelConfig::default().escape_margin
}
fn default_max_descent_iters() -> usize {
    TunnelConfig::default().max_descent_iters
}
fn default_max_tunnel_iters() -> usize {
    TunnelConfig::default().max_tunnel_iters
}
fn default_max_tunnels() -> usize {
    TunnelConfig::default().max_tunnels
}
fn default_perturb_radius() -> f64 {
    TunnelConfig::default().perturb_radius
}
fn default_descent() -> DescentKind {
    DescentKind::Plain
}
fn default_n_samples() -> usize {
    1
}

/// Everything needed to reproduce one ensemble. Serialized as a flat JSON
/// object; problem fields that do not apply must be left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default = "default_j", alias = "J")]
    pub j: f64,
    #[serde(default, alias = "B")]
    pub b: f64,
    /// Defaults to 2 for quantum problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ansatz_blocks: Option<usize>,
    pub method: Method,
    #[serde(default = "default_descent")]
    pub descent: DescentKind,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_lambda_multiplier")]
    pub lambda_multiplier: f64,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    #[serde(default = "default_escape_margin")]
    pub escape_margin: f64,
    #[serde(default = "default_max_descent_iters")]
    pub max_descent_iters: usize,
    #[serde(default = "default_max_tunnel_iters")]
    pub max_tunnel_iters: usize,
    #[serde(default = "default_max_tunnels")]
    pub max_tunnels: usize,
    /// Defaults to `cap_2_pow_lambda` for the conventional method and `none` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamp: Option<Clamp>,
    #[serde(default = "default_perturb_radius")]
    pub perturb_radius: f64,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    /// Initial angles are uniform on `[init_lo, init_hi)`: `[0, 2π)` for
    /// quantum problems and one period for the toy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_hi: Option<f64>,
    /// Fixed starting point shared by every sample, overriding `init_*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    /// A config for `problem` and `method` with every other field at its default.
    pub fn new(problem: ProblemKind, method: Method) -> Self {
        serde_json::from_value(serde_json::json!({
            "problem": problem,
            "method": method,
        }))
        .expect("defaults deserialize")
    }

    pub fn chain(n_sites: usize, j: f64, b: f64, method: Method) -> Self {
        Self {
            n_sites: Some(n_sites),
            j,
            b,
            ..Self::new(ProblemKind::Chain, method)
        }
    }

    pub fn grid(rows: usize, cols: usize, j: f64, b: f64, method: Method) -> Self {
        Self {
            rows: Some(rows),
            cols: Some(cols),
            j,
            b,
            ..Self::new(ProblemKind::Grid, method)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn ansatz(&self) -> Option<AnsatzSpec> {
        let topology = match self.problem {
            ProblemKind::Toy => return None,
            ProblemKind::Chain => Topology::Chain(self.n_sites?),
            ProblemKind::Grid => Topology::Grid {
                rows: self.rows?,
                cols: self.cols?,
            },
        };
        Some(AnsatzSpec {
            topology,
            n_blocks: self.ansatz_blocks.unwrap_or(2),
        })
    }

    /// Number of variational parameters.
    pub fn dimension(&self) -> usize {
        self.ansatz().map_or(1, |a| a.n_params())
    }

    pub fn init_range(&self) -> (f64, f64) {
        let (lo, hi) = match self.problem {
            ProblemKind::Toy => (0.0, TOY_PERIOD),
            _ => (0.0, TAU),
        };
        (self.init_lo.unwrap_or(lo), self.init_hi.unwrap_or(hi))
    }

    pub fn clamp(&self) -> Clamp {
        self.clamp.unwrap_or(match self.method {
            Method::TunnelConventional => Clamp::Cap2PowLambda,
            _ => Clamp::None,
        })
    }

    /// Engine settings for one sample.
    pub fn tunnel_config(&self, seed: u64) -> TunnelConfig {
        TunnelConfig {
            k: self.k,
            lambda_multiplier: self.lambda_multiplier,
            learning_rate: self.learning_rate,
            grad_tol: self.grad_tol,
            escape_margin: self.escape_margin,
            max_descent_iters: self.max_descent_iters,
            max_tunnel_iters: self.max_tunnel_iters,
            max_tunnels: match self.method {
                Method::DescentOnly => 0,
                _ => self.max_tunnels,
            },
            clamp: self.clamp(),
            perturb_radius: self.perturb_radius,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_samples == 0 {
            return bad("n_samples must be at least 1".into());
        }
        match self.problem {
            ProblemKind::Toy => {
                let extras = [
                    ("n_sites", self.n_sites.is_some()),
                    ("rows", self.rows.is_some()),
                    ("cols", self.cols.is_some()),
                    ("ansatz_blocks", self.ansatz_blocks.is_some()),
                ];
                if let Some((name, _)) = extras.iter().find(|(_, set)| *set) {
                    return bad(format!("{name} does not apply to the toy problem"));
                }
                if self.method == Method::TunnelModified {
                    return bad("tunnel_modified needs a quantum problem".into());
                }
            }
            ProblemKind::Chain => {
                if self.rows.is_some() || self.cols.is_some() {
                    return bad("rows/cols do not apply to a chain".into());
                }
                match self.n_sites {
                    Some(n) if n >= 2 => {}
                    _ => return bad("chain needs n_sites >= 2".into()),
                }
            }
            ProblemKind::Grid => {
                if self.n_sites.is_some() {
                    return bad("n_sites does not apply to a grid".into());
                }
                match (self.rows, self.cols) {
                    (Some(r), Some(c)) if r >= 2 && c >= 2 => {}
                    _ => return bad("grid needs rows >= 2 and cols >= 2".into()),
                }
            }
        }
        if self.ansatz_blocks == Some(0) {
            return bad("ansatz_blocks must be at least 1".into());
        }
        if !(self.j.is_finite() && self.b.is_finite()) {
            return bad(format!("non-finite couplings J={}, B={}", self.j, self.b));
        }
        let (lo, hi) = self.init_range();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad(format!("init range [{lo}, {hi}) is empty"));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != self.dimension() {
                return bad(format!(
                    "x0 has {} entries, problem has {} parameters",
                    x0.len(),
                    self.dimension()
                ));
            }
            if x0.iter().any(|v| !v.is_finite()) {
                return bad("x0 must be finite".into());
            }
        }
        self.tunnel_config(0).validate()
    }
}

/// Per-sample seed: a splitmix64 hash of the master seed and the sample index,
/// so a sample's result does not depend on how many samples run.
pub fn sample_seed(master: u64, sample_id: usize) -> u64 {
    let mut z = master.wrapping_add((sample_id as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The cost oracle and distance measure a config calls for.
pub struct Problem {
    oracle: Box<dyn CostOracle>,
    distance: Box<dyn DistanceMeasure>,
}

impl Problem {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let oracle: Box<dyn CostOracle> = match cfg.problem {
            ProblemKind::Toy => Box::new(ToyOracle),
            ProblemKind::Chain | ProblemKind::Grid => {
                let hamiltonian = match cfg.problem {
                    ProblemKind::Chain => tfim_chain(ChainSpec {
                        n_sites: cfg.n_sites.unwrap_or_default(),
                        j: cfg.j,
                        b: cfg.b,
                    })?,
                    _ => tfim_grid(GridSpec {
                        rows: cfg.rows.unwrap_or_default(),
                        cols: cfg.cols.unwrap_or_default(),
                        j: cfg.j,
                        b: cfg.b,
                    })?,
                };
                let circuit = cfg.ansatz().expect("validated quantum problem").build()?;
                Box::new(VqeOracle::new(circuit, &hamiltonian)?)
            }
        };
        let distance: Box<dyn DistanceMeasure> = match cfg.method {
            Method::TunnelModified => Box::new(HilbertSchmidt),
            _ => Box::new(Euclidean),
        };
        Ok(Self { oracle, distance })
    }

    pub fn oracle(&self) -> &dyn CostOracle {
        self.oracle.as_ref()
    }

    pub fn distance(&self) -> &dyn DistanceMeasure {
        self.distance.as_ref()
    }
}

#[derive(Debug, Clone)]
pub struct SampleResult {
    pub sample_id: usize,
    pub seed: u64,
    pub x0: Vec<f64>,
    pub run: TunnelRun,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    /// Sorted by `sample_id`.
    pub samples: Vec<SampleResult>,
}

impl Experiment {
    pub fn histogram(&self) -> Vec<HistogramRecord> {
        self.samples
            .iter()
            .map(|s| HistogramRecord {
                sample_id: s.sample_id,
                seed: s.seed,
                final_best_f: s.run.best.value,
                n_tunnels_used: s.run.tunnels_used(),
                termination: s.run.termination,
                wall_iterations: s.run.iterations(),
            })
            .collect()
    }

    pub fn profile(&self) -> Vec<ProfileRecord> {
        self.samples
            .iter()
            .flat_map(|s| {
                s.run.trace.iter().enumerate().map(move |(i, r)| ProfileRecord {
                    sample_id: s.sample_id,
                    global_iteration: i,
                    phase: r.phase,
                    f: r.value,
                    distance_to_stable: r.distance,
                })
            })
            .collect()
    }

    pub fn runs(&self) -> impl Iterator<Item = &TunnelRun> {
        self.samples.iter().map(|s| &s.run)
    }

    /// Fraction of samples whose best value is within `tol` of `target`.
    pub fn success_fraction(&self, target: f64, tol: f64) -> f64 {
        let hits = self
            .samples
            .iter()
            .filter(|s| (s.run.best.value - target).abs() <= tol)
            .count();
        hits as f64 / self.samples.len() as f64
    }
}

/// Runs sample `sample_id` of `cfg` on an already built problem.
pub fn run_sample(cfg: &ExperimentConfig, problem: &Problem, sample_id: usize) -> Result<SampleResult> {
    let seed = sample_seed(cfg.seed, sample_id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = cfg.init_range();
    let x0 = match &cfg.x0 {
        Some(x0) => x0.clone(),
        None => (0..cfg.dimension()).map(|_| rng.gen_range(lo..hi)).collect(),
    };
    let tunnel = cfg.tunnel_config(rng.gen());
    let run = dynamic_tunneling(problem.oracle(), problem.distance(), &x0, &tunnel, cfg.descent)?;
    Ok(SampleResult {
        sample_id,
        seed,
        x0,
        run,
    })
}

/// Runs every sample of `cfg` on the rayon pool. The result does not depend on
/// the number of worker threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    let problem = Problem::build(cfg)?;
    let samples = (0..cfg.n_samples)
        .into_par_iter()
        .map(|id| run_sample(cfg, &problem, id))
        .collect::<Result<Vec<_>>>()?;
    Ok(Experiment {
        config: cfg.clone(),
        samples,
    })
}
