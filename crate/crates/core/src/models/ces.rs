//! Constant-elasticity families: CES, the unweighted power mean and the
//! hybrid weighting. All three are `A · (Σ w_i x_i^ρ)^(1/ρ)` and homogeneous
//! of degree one.

use serde::Serialize;

use super::{param_err, positive_scale, require_positive, Family};
use crate::error::Result;
use crate::types::{FactorInputs, FactorSnapshot};

/// `A · (Σ w_i x_i^ρ)^(1/ρ)` and its gradient
/// `∂Q/∂x_i = A · w_i · x_i^(ρ-1) · (Σ w x^ρ)^(1/ρ - 1)`.
fn weighted_power_mean(
    scale: f64,
    weights: [f64; 4],
    rho: f64,
    inputs: &FactorInputs,
) -> (f64, [f64; 4]) {
    let x = inputs.as_array();
    let sum: f64 = weights.iter().zip(x).map(|(w, xi)| w * xi.powf(rho)).sum();
    let q = scale * sum.powf(1.0 / rho);
    let tail = scale * sum.powf(1.0 / rho - 1.0);
    let prices = [0, 1, 2, 3].map(|i| weights[i] * x[i].powf(rho - 1.0) * tail);
    (q, prices)
}

fn is_positive_integer(v: f64) -> bool {
    v >= 1.0 && v.fract() == 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CesParams {
    pub scale: f64,
    /// Distribution parameters δ1..δ4 for (L, L_agi, K, K_agi).
    pub shares: [f64; 4],
    pub rho: f64,
}

impl CesParams {
    pub(super) fn validate(&self) -> Result<()> {
        positive_scale(Family::Ces, self.scale)?;
        if self.rho == 0.0 {
            return Err(param_err(Family::Ces, "rho", "must be non-zero"));
        }
        const NAMES: [&str; 4] = ["delta1", "delta2", "delta3", "delta4"];
        for (name, share) in NAMES.iter().zip(self.shares) {
            if share < 0.0 {
                return Err(param_err(Family::Ces, name, "must be >= 0"));
            }
        }
        if self.shares.iter().all(|&s| s == 0.0) {
            return Err(param_err(
                Family::Ces,
                "delta1",
                "shares must not all be zero",
            ));
        }
        Ok(())
    }

    fn check_domain(&self, inputs: &FactorInputs) -> Result<()> {
        // Zero inputs are fine only when x^ρ and x^(ρ-1) stay finite.
        if is_positive_integer(self.rho) {
            Ok(())
        } else {
            require_positive(Family::Ces, inputs)
        }
    }

    pub(super) fn output(&self, inputs: &FactorInputs) -> Result<f64> {
        self.check_domain(inputs)?;
        Ok(weighted_power_mean(self.scale, self.shares, self.rho, inputs).0)
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> Result<FactorSnapshot> {
        self.check_domain(inputs)?;
        let (q, prices) = weighted_power_mean(self.scale, self.shares, self.rho, inputs);
        Ok(FactorSnapshot::new(q, prices))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerParams {
    pub scale: f64,
    pub p: f64,
}

impl PowerParams {
    pub(super) fn validate(&self) -> Result<()> {
        positive_scale(Family::Power, self.scale)?;
        if self.p == 0.0 {
            return Err(param_err(Family::Power, "p", "must be non-zero"));
        }
        Ok(())
    }

    pub(super) fn output(&self, inputs: &FactorInputs) -> Result<f64> {
        require_positive(Family::Power, inputs)?;
        Ok(weighted_power_mean(self.scale, [1.0; 4], self.p, inputs).0)
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> Result<FactorSnapshot> {
        require_positive(Family::Power, inputs)?;
        let (q, prices) = weighted_power_mean(self.scale, [1.0; 4], self.p, inputs);
        Ok(FactorSnapshot::new(q, prices))
    }
}

/// CES with paired weights: `λ` / `1-λ` between human and AGI labor,
/// `μ` / `1-μ` between human and AGI capital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HybridParams {
    pub scale: f64,
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
}

impl HybridParams {
    pub fn weights(&self) -> [f64; 4] {
        [self.lambda, 1.0 - self.lambda, self.mu, 1.0 - self.mu]
    }

    pub(super) fn validate(&self) -> Result<()> {
        positive_scale(Family::Hybrid, self.scale)?;
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(param_err(Family::Hybrid, "lambda", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(param_err(Family::Hybrid, "mu", "must lie in [0, 1]"));
        }
        if self.rho == 0.0 {
            return Err(param_err(Family::Hybrid, "rho", "must be non-zero"));
        }
        Ok(())
    }

    pub(super) fn output(&self, inputs: &FactorInputs) -> Result<f64> {
        require_positive(Family::Hybrid, inputs)?;
        Ok(weighted_power_mean(self.scale, self.weights(), self.rho, inputs).0)
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> Result<FactorSnapshot> {
        require_positive(Family::Hybrid, inputs)?;
        let (q, prices) = weighted_power_mean(self.scale, self.weights(), self.rho, inputs);
        Ok(FactorSnapshot::new(q, prices))
    }
}
