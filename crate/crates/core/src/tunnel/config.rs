use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the pole coefficient `d^(-2λ)` is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clamp {
    /// Raw `d^(-2λ)`, with `d` floored at [`MIN_DISTANCE`].
    None,
    /// `min(d^(-2λ), 2^λ)`.
    #[serde(rename = "cap_2_pow_lambda")]
    Cap2PowLambda,
    /// `max(d, ε)^(-2λ)`.
    DistanceFloor(f64),
}

/// Floor applied to every distance before it enters the pole term.
pub const MIN_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentKind {
    Plain,
    Fista,
}

/// Hyperparameters shared by the descent and tunneling phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelConfig {
    /// Weight of the ReLU penalty.
    pub k: f64,
    pub lambda_multiplier: f64,
    /// Euler step for both descent and tunneling.
    pub learning_rate: f64,
    /// Stable-point tolerance per `sqrt(dimension)`; see [`TunnelConfig::grad_tol_for`].
    pub grad_tol: f64,
    /// Relative escape margin; see [`TunnelConfig::escape_threshold`].
    pub escape_margin: f64,
    pub max_descent_iters: usize,
    pub max_tunnel_iters: usize,
    pub max_tunnels: usize,
    pub clamp: Clamp,
    /// Radius of the random kick that starts each tunneling phase.
    pub perturb_radius: f64,
    pub seed: u64,
}

impl Default for TunnelConfig {
    fn default() -> Self {
        Self {
            k: 1.125,
            lambda_multiplier: 1.5,
            learning_rate: 0.01,
            grad_tol: 1e-4,
            escape_margin: 1e-6,
            max_descent_iters: 2000,
            max_tunnel_iters: 2000,
            max_tunnels: 6,
            clamp: Clamp::None,
            perturb_radius: 1e-3,
            seed: 0,
        }
    }
}

impl TunnelConfig {
    /// Absolute gradient-norm tolerance for a problem of `dimension` parameters.
    pub fn grad_tol_for(&self, dimension: usize) -> f64 {
        self.grad_tol * (dimension.max(1) as f64).sqrt()
    }

    /// A tunneling phase escapes once `f < f̄ - threshold`.
    pub fn escape_threshold(&self, stable_value: f64) -> f64 {
        self.escape_margin * stable_value.abs().max(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda_multiplier", self.lambda_multiplier),
            ("learning_rate", self.learning_rate),
            ("grad_tol", self.grad_tol),
            ("perturb_radius", self.perturb_radius),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(Error::Config(format!("k must be >= 0, got {}", self.k)));
        }
        if !(self.escape_margin.is_finite() && self.escape_margin >= 0.0) {
            return Err(Error::Config(format!(
                "escape_margin must be >= 0, got {}",
                self.escape_margin
            )));
        }
        if self.max_descent_iters == 0 || self.max_tunnel_iters == 0 {
            return Err(Error::Config("iteration limits must be positive".into()));
        }
        if let Clamp::DistanceFloor(eps) = self.clamp {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::Config(format!("distance floor must be positive, got {eps}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        TunnelConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            TunnelConfig { learning_rate: 0.0, ..Default::default() },
            TunnelConfig { k: -1.0, ..Default::default() },
            TunnelConfig { max_tunnel_iters: 0, ..Default::default() },
            TunnelConfig { clamp: Clamp::DistanceFloor(0.0), ..Default::default() },
            TunnelConfig { perturb_radius: f64::NAN, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
    }

    #[test]
    fn derived_tolerances() {
        let cfg = TunnelConfig::default();
        assert!((cfg.grad_tol_for(4) - 2e-4).abs() < 1e-18);
        assert!((cfg.escape_threshold(-50.0) - 5e-5).abs() < 1e-18);
        assert_eq!(cfg.escape_threshold(0.2), 1e-6);
    }
}
