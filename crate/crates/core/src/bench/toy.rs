//! A one-dimensional cost with three valleys per period, used to demonstrate
//! the descent/tunnel alternation on something small enough to plot.

use std::f64::consts::PI;

use crate::error::Result;
use crate::tunnel::{CostOracle, Evaluation, StateToken};

/// Period of [`toy_cost`].
pub const TOY_PERIOD: f64 = 4.0;

/// Value and derivative of
/// `cos(π/2·(x−1/2)) − cos(2π(x+3/2))/2 + sin(π(x+1/2)) − 3/2·sin(π/2·(x+1))`.
pub fn toy_cost(x: f64) -> (f64, f64) {
    let h = PI / 2.0;
    let value = (h * (x - 0.5)).cos() - 0.5 * (2.0 * PI * (x + 1.5)).cos() + (PI * (x + 0.5)).sin()
        - 1.5 * (h * (x + 1.0)).sin();
    let grad = -h * (h * (x - 0.5)).sin() + PI * (2.0 * PI * (x + 1.5)).sin() + PI * (PI * (x + 0.5)).cos()
        - 1.5 * h * (h * (x + 1.0)).cos();
    (value, grad)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ToyOracle;

impl CostOracle for ToyOracle {
    fn dimension(&self) -> usize {
        1
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        let (value, grad) = toy_cost(x[0]);
        Ok(Evaluation {
            value,
            gradient: vec![grad],
            token: StateToken::from_params(x),
        })
    }
}

/// Minimum of [`toy_cost`] over `[lo, hi]` sampled every `step`.
pub fn grid_minimum(lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let n = ((hi - lo) / step).floor() as usize;
    (0..=n)
        .map(|i| lo + i as f64 * step)
        .map(|x| (x, toy_cost(x).0))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid")
}
