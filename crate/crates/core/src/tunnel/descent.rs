//! Local descent phases and the λ estimate attached to each stable point.

use super::config::{DescentKind, TunnelConfig};
use super::oracle::{CostOracle, DistanceMeasure, Evaluation, StateToken};
use crate::error::{Error, Result};

/// Lower bound on the fitted convergence exponent.
pub const P_FLOOR: f64 = 0.5;

/// A local minimum reported by a descent phase.
#[derive(Debug, Clone)]
pub struct StablePoint {
    pub x: Vec<f64>,
    pub value: f64,
    pub token: StateToken,
    pub lambda: f64,
    pub descent_iters: usize,
    pub grad_norm: f64,
    /// False when the descent ran out of iterations before meeting the tolerance.
    pub converged: bool,
}

/// One evaluated point kept for the λ fit.
#[derive(Debug, Clone)]
pub struct Iterate {
    pub x: Vec<f64>,
    pub grad_norm: f64,
    pub token: StateToken,
}

#[derive(Debug, Clone, Default)]
pub struct DescentTrace {
    /// Cost at every evaluated point, the final one included.
    pub values: Vec<f64>,
    /// Up to two iterates preceding the final point, oldest first.
    pub tail: Vec<Iterate>,
}

impl DescentTrace {
    fn push_tail(&mut self, x: &[f64], eval: &Evaluation) {
        if self.tail.len() == 2 {
            self.tail.remove(0);
        }
        self.tail.push(Iterate {
            x: x.to_vec(),
            grad_norm: eval.grad_norm(),
            token: eval.token.clone(),
        });
    }
}

fn checked_eval(
    oracle: &dyn CostOracle,
    x: &[f64],
    phase: &'static str,
    iteration: usize,
) -> Result<Evaluation> {
    let eval = oracle.evaluate(x)?;
    if !eval.value.is_finite() || eval.gradient.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numeric {
            phase,
            iteration,
            detail: format!("non-finite cost or gradient at x = {x:?}"),
        });
    }
    Ok(eval)
}

fn check_dimension(oracle: &dyn CostOracle, x0: &[f64]) -> Result<()> {
    if x0.len() != oracle.dimension() {
        return Err(Error::Arity {
            expected: oracle.dimension(),
            got: x0.len(),
        });
    }
    Ok(())
}

fn finish(
    x: Vec<f64>,
    eval: Evaluation,
    iters: usize,
    converged: bool,
    trace: &DescentTrace,
    dist: &dyn DistanceMeasure,
    cfg: &TunnelConfig,
) -> StablePoint {
    let lambda = estimate_lambda(&trace.tail, &eval.token, dist, cfg.lambda_multiplier);
    StablePoint {
        grad_norm: eval.grad_norm(),
        value: eval.value,
        token: eval.token,
        x,
        lambda,
        descent_iters: iters,
        converged,
    }
}

/// `x <- x - η ∇f(x)` until `|∇f| < tol` or the iteration limit.
pub fn gradient_descent(
    oracle: &dyn CostOracle,
    dist: &dyn DistanceMeasure,
    x0: &[f64],
    cfg: &TunnelConfig,
) -> Result<(StablePoint, DescentTrace)> {
    check_dimension(oracle, x0)?;
    let tol = cfg.grad_tol_for(oracle.dimension());
    let mut trace = DescentTrace::default();
    let mut x = x0.to_vec();
    let mut iter = 0;
    loop {
        let eval = checked_eval(oracle, &x, "descent", iter)?;
        trace.values.push(eval.value);
        let converged = eval.grad_norm() < tol;
        if converged || iter == cfg.max_descent_iters {
            let sp = finish(x, eval, iter, converged, &trace, dist, cfg);
            return Ok((sp, trace));
        }
        trace.push_tail(&x, &eval);
        for (xi, gi) in x.iter_mut().zip(&eval.gradient) {
            *xi -= cfg.learning_rate * gi;
        }
        iter += 1;
    }
}

/// Nesterov-accelerated descent (FISTA without a proximal term) with function
/// restart: the momentum sequence resets to `t = 1` whenever the cost at the
/// extrapolated point goes up.
pub fn fista_descent(
    oracle: &dyn CostOracle,
    dist: &dyn DistanceMeasure,
    x0: &[f64],
    cfg: &TunnelConfig,
) -> Result<(StablePoint, DescentTrace)> {
    check_dimension(oracle, x0)?;
    let tol = cfg.grad_tol_for(oracle.dimension());
    let mut trace = DescentTrace::default();
    let mut y = x0.to_vec();
    let mut x_prev = x0.to_vec();
    let mut t = 1.0f64;
    let mut last_value = f64::INFINITY;
    let mut iter = 0;
    loop {
        let eval = checked_eval(oracle, &y, "descent", iter)?;
        trace.values.push(eval.value);
        let converged = eval.grad_norm() < tol;
        if converged || iter == cfg.max_descent_iters {
            let sp = finish(y, eval, iter, converged, &trace, dist, cfg);
            return Ok((sp, trace));
        }
        trace.push_tail(&y, &eval);
        if eval.value > last_value {
            t = 1.0;
        }
        last_value = eval.value;

        let x: Vec<f64> = y
            .iter()
            .zip(&eval.gradient)
            .map(|(yi, gi)| yi - cfg.learning_rate * gi)
            .collect();
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_next;
        y = x
            .iter()
            .zip(&x_prev)
            .map(|(xi, pi)| xi + beta * (xi - pi))
            .collect();
        x_prev = x;
        t = t_next;
        iter += 1;
    }
}

pub fn descend(
    kind: DescentKind,
    oracle: &dyn CostOracle,
    dist: &dyn DistanceMeasure,
    x0: &[f64],
    cfg: &TunnelConfig,
) -> Result<(StablePoint, DescentTrace)> {
    match kind {
        DescentKind::Plain => gradient_descent(oracle, dist, x0, cfg),
        DescentKind::Fista => fista_descent(oracle, dist, x0, cfg),
    }
}

/// `multiplier · max(p, P_FLOOR)` where `p = ln(g_b/g_a) / ln(d_b/d_a)` is fitted
/// from the last two iterates `a`, `b` before the stable point: `g` are their
/// gradient norms and `d` their distances to `anchor` under `dist`. Falls back
/// to `multiplier` when the fit is degenerate.
pub fn estimate_lambda(
    tail: &[Iterate],
    anchor: &StateToken,
    dist: &dyn DistanceMeasure,
    multiplier: f64,
) -> f64 {
    let [.., a, b] = tail else {
        return multiplier;
    };
    let (da, db) = (dist.distance(&a.token, anchor), dist.distance(&b.token, anchor));
    let p = (b.grad_norm / a.grad_norm).ln() / (db / da).ln();
    if da == db || !p.is_finite() {
        return multiplier;
    }
    multiplier * p.max(P_FLOOR)
}
