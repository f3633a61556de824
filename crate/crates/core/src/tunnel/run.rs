use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{DescentKind, TunnelConfig};
use super::descent::{descend, StablePoint};
use super::flow::{tunnel_flow, FlowStatus};
use super::oracle::{CostOracle, DistanceMeasure, StateToken};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Descent,
    Tunnel,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Descent => "descent",
            Phase::Tunnel => "tunnel",
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "descent" => Ok(Phase::Descent),
            "tunnel" => Ok(Phase::Tunnel),
            _ => Err(Error::Parse(format!("unknown phase {s:?}"))),
        }
    }
}

/// One iteration of either phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub phase: Phase,
    pub value: f64,
    /// Distance to the current stable point; only recorded while tunneling.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The last tunneling phase found no lower valley.
    TunnelExhausted,
    /// The configured number of tunneling phases all escaped.
    MaxTunnelsReached,
    /// A descent phase hit its iteration limit before converging.
    IterationBudget,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::TunnelExhausted => "tunnel_exhausted",
            Termination::MaxTunnelsReached => "max_tunnels_reached",
            Termination::IterationBudget => "iteration_budget",
        }
    }
}

impl std::str::FromStr for Termination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Termination::TunnelExhausted,
            Termination::MaxTunnelsReached,
            Termination::IterationBudget,
        ]
        .into_iter()
        .find(|t| t.as_str() == s)
        .ok_or_else(|| Error::Parse(format!("unknown termination {s:?}")))
    }
}

/// Bookkeeping for one tunneling phase.
#[derive(Debug, Clone)]
pub struct TunnelAttempt {
    /// Index into [`TunnelRun::stable_points`] of the point tunneled from.
    pub origin: usize,
    pub status: FlowStatus,
    pub iterations: usize,
    /// Where the flow ended: the escape point, or its last iterate.
    pub end: StateToken,
    pub end_value: f64,
    /// Flow speed at the end point.
    pub end_speed: f64,
}

#[derive(Debug, Clone)]
pub struct TunnelRun {
    pub stable_points: Vec<StablePoint>,
    pub tunnels: Vec<TunnelAttempt>,
    pub trace: Vec<TraceRecord>,
    pub best: StablePoint,
    pub termination: Termination,
}

impl TunnelRun {
    pub fn tunnels_used(&self) -> usize {
        self.tunnels.len()
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Alternates descent and tunneling from `x0` until a tunnel fails to escape,
/// `max_tunnels` tunnels have escaped, or a descent runs out of iterations.
pub fn dynamic_tunneling(
    oracle: &dyn CostOracle,
    dist: &dyn DistanceMeasure,
    x0: &[f64],
    cfg: &TunnelConfig,
    descent: DescentKind,
) -> Result<TunnelRun> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stable_points: Vec<StablePoint> = Vec::new();
    let mut tunnels = Vec::new();
    let mut trace = Vec::new();
    let mut x = x0.to_vec();

    let termination = loop {
        let offset = trace.len();
        let (sp, dtrace) = descend(descent, oracle, dist, &x, cfg).map_err(|e| at_offset(e, offset))?;
        trace.extend(dtrace.values.iter().map(|&value| TraceRecord {
            phase: Phase::Descent,
            value,
            distance: None,
        }));
        let converged = sp.converged;
        stable_points.push(sp);
        if !converged {
            break Termination::IterationBudget;
        }
        if tunnels.len() == cfg.max_tunnels {
            break Termination::MaxTunnelsReached;
        }

        let origin = stable_points.len() - 1;
        let offset = trace.len();
        let out = tunnel_flow(oracle, dist, &stable_points[origin], cfg, &mut rng)
            .map_err(|e| at_offset(e, offset))?;
        trace.extend(out.steps.iter().map(|s| TraceRecord {
            phase: Phase::Tunnel,
            value: s.value,
            distance: Some(s.distance),
        }));
        tunnels.push(TunnelAttempt {
            origin,
            status: out.status,
            iterations: out.steps.len(),
            end: out.token.clone(),
            end_value: out.value,
            end_speed: out.speed,
        });
        if !out.escaped() {
            break Termination::TunnelExhausted;
        }
        x = out.x;
    };

    let best = stable_points
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .cloned()
        .expect("at least one descent ran");
    Ok(TunnelRun {
        stable_points,
        tunnels,
        trace,
        best,
        termination,
    })
}

/// Rewrites a phase-local iteration index as a run-global one.
fn at_offset(e: Error, offset: usize) -> Error {
    match e {
        Error::Numeric {
            phase,
            iteration,
            detail,
        } => Error::Numeric {
            phase,
            iteration: iteration + offset,
            detail,
        },
        other => other,
    }
}
