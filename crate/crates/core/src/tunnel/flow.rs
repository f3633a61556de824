//! The tunneling flow
//!
//! ```text
//! dx/dt = -( 1 / D(x, x̄)^(2λ) + k · ReLU(f(x) - f(x̄)) ) · ∇f(x)
//! ```
//!
//! integrated with explicit Euler steps of size η. `D` is whatever
//! [`DistanceMeasure`] the caller supplies: Euclidean on parameters gives the
//! classic flow, Hilbert-Schmidt on prepared states gives the state-aware one.

use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{Clamp, TunnelConfig, MIN_DISTANCE};
use super::descent::StablePoint;
use super::oracle::{norm, CostOracle, DistanceMeasure, Evaluation, Euclidean, StateToken};
use crate::error::{Error, Result};

pub fn pole_factor(d: f64, lambda: f64, clamp: Clamp) -> f64 {
    let d = d.max(MIN_DISTANCE);
    match clamp {
        Clamp::None => d.powf(-2.0 * lambda),
        Clamp::Cap2PowLambda => d.powf(-2.0 * lambda).min(2f64.powf(lambda)),
        Clamp::DistanceFloor(eps) => d.max(eps).powf(-2.0 * lambda),
    }
}

pub fn penalty_factor(f: f64, f_stable: f64, k: f64) -> f64 {
    k * (f - f_stable).max(0.0)
}

/// `(f - f̄) / |x - x̄|^(2λ) + (k/2) · ReLU(f - f̄)^2`, the energy whose negative
/// gradient the flow approximates. Diagnostic only.
pub fn energy_function(
    oracle: &dyn CostOracle,
    x: &[f64],
    sp: &StablePoint,
    k: f64,
) -> Result<f64> {
    let d = Euclidean.distance(&StateToken::from_params(x), &StateToken::from_params(&sp.x));
    if d == 0.0 {
        return Err(Error::Pole);
    }
    let delta = oracle.evaluate(x)?.value - sp.value;
    Ok(delta * pole_factor(d, sp.lambda, Clamp::None) + 0.5 * k * delta.max(0.0).powi(2))
}

/// `true` iff the two stable points are closer than `tol` under `dist`.
pub fn same_state(a: &StablePoint, b: &StablePoint, dist: &dyn DistanceMeasure, tol: f64) -> bool {
    dist.distance(&a.token, &b.token) < tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowStatus {
    /// Found `f < f̄ - δ`.
    Escaped,
    /// Ran `max_tunnel_iters` steps without escaping.
    Exhausted,
}

/// One tunneling step as recorded for profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowStep {
    pub value: f64,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct TunnelOutcome {
    pub status: FlowStatus,
    /// Escape point, or the last iterate when exhausted.
    pub x: Vec<f64>,
    pub value: f64,
    pub token: StateToken,
    /// `|dx/dt|` at the returned point; small means the flow has settled.
    pub speed: f64,
    pub steps: Vec<FlowStep>,
}

impl TunnelOutcome {
    pub fn escaped(&self) -> bool {
        self.status == FlowStatus::Escaped
    }
}

/// Unit vector drawn uniformly from the sphere.
pub fn random_direction(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Runs the flow from `x̄ + perturb_radius · u` with `u` a random unit vector.
pub fn tunnel_flow(
    oracle: &dyn CostOracle,
    dist: &dyn DistanceMeasure,
    sp: &StablePoint,
    cfg: &TunnelConfig,
    rng: &mut impl Rng,
) -> Result<TunnelOutcome> {
    let u = random_direction(oracle.dimension(), rng);
    let mut x: Vec<f64> = sp
        .x
        .iter()
        .zip(&u)
        .map(|(xi, ui)| xi + cfg.perturb_radius * ui)
        .collect();
    let threshold = sp.value - cfg.escape_threshold(sp.value);
    let mut steps = Vec::new();

    for iteration in 0.. {
        let eval = oracle.evaluate(&x)?;
        let d = dist.distance(&eval.token, &sp.token);
        steps.push(FlowStep {
            value: eval.value,
            distance: d,
        });
        let coefficient = pole_factor(d, sp.lambda, cfg.clamp) + penalty_factor(eval.value, sp.value, cfg.k);
        let speed = coefficient * eval.grad_norm();

        let escaped = eval.value < threshold;
        if escaped || iteration + 1 == cfg.max_tunnel_iters {
            return Ok(finish(x, eval, speed, escaped, steps));
        }

        let step = cfg.learning_rate * coefficient;
        for (xi, gi) in x.iter_mut().zip(&eval.gradient) {
            *xi -= step * gi;
        }
        if !eval.value.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric {
                phase: "tunnel",
                iteration,
                detail: format!(
                    "non-finite update (f = {}, distance = {d:e}, coefficient = {coefficient:e})",
                    eval.value
                ),
            });
        }
    }
    unreachable!("loop returns once the iteration limit is hit")
}

fn finish(x: Vec<f64>, eval: Evaluation, speed: f64, escaped: bool, steps: Vec<FlowStep>) -> TunnelOutcome {
    TunnelOutcome {
        status: if escaped { FlowStatus::Escaped } else { FlowStatus::Exhausted },
        x,
        value: eval.value,
        token: eval.token,
        speed,
        steps,
    }
}
