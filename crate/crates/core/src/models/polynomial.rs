//! Families that admit zero inputs: Leontief, linear and quadratic.

use serde::Serialize;

use super::{param_err, Family};
use crate::error::Result;
use crate::types::{FactorInputs, FactorSnapshot};

/// Fixed-proportions technology `Q = min(L/a, L_agi/b, K/c, K_agi/d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeontiefParams {
    /// Input requirements (a, b, c, d) per unit of output.
    pub coefficients: [f64; 4],
    /// Value of one more unit of output; factor prices are `λ / coefficient`.
    pub shadow_price: f64,
}

impl LeontiefParams {
    pub(super) fn validate(&self) -> Result<()> {
        const NAMES: [&str; 4] = ["a", "b", "c", "d"];
        for (name, coef) in NAMES.iter().zip(self.coefficients) {
            if coef <= 0.0 {
                return Err(param_err(Family::Leontief, name, "must be > 0"));
            }
        }
        if self.shadow_price <= 0.0 {
            return Err(param_err(Family::Leontief, "shadow_price", "must be > 0"));
        }
        Ok(())
    }

    pub(super) fn output(&self, inputs: &FactorInputs) -> f64 {
        inputs
            .as_array()
            .iter()
            .zip(self.coefficients)
            .map(|(x, coef)| x / coef)
            .fold(f64::INFINITY, f64::min)
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> FactorSnapshot {
        let prices = self.coefficients.map(|coef| self.shadow_price / coef);
        FactorSnapshot::new(self.output(inputs), prices)
    }
}

/// Perfect substitutes `Q = aL + bL_agi + cK + dK_agi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearParams {
    pub weights: [f64; 4],
}

impl LinearParams {
    pub(super) fn output(&self, inputs: &FactorInputs) -> f64 {
        let x = inputs.as_array();
        let w = self.weights;
        w[0] * x[0] + w[1] * x[1] + w[2] * x[2] + w[3] * x[3]
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> FactorSnapshot {
        FactorSnapshot::new(self.output(inputs), self.weights)
    }
}

/// `Q = A + bL + cL_agi + fL² + gL_agi² + hK² + iK_agi²`.
///
/// There are no linear capital terms, so both capital returns vanish at zero
/// capital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticParams {
    pub constant: f64,
    pub b: f64,
    pub c: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub i: f64,
}

impl QuadraticParams {
    pub(super) fn output(&self, inputs: &FactorInputs) -> f64 {
        let FactorInputs {
            labor: l,
            agi_labor: la,
            capital: k,
            agi_capital: ka,
            ..
        } = *inputs;
        self.constant
            + self.b * l
            + self.c * la
            + self.f * l * l
            + self.g * la * la
            + self.h * k * k
            + self.i * ka * ka
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> FactorSnapshot {
        let prices = [
            self.b + 2.0 * self.f * inputs.labor,
            self.c + 2.0 * self.g * inputs.agi_labor,
            2.0 * self.h * inputs.capital,
            2.0 * self.i * inputs.agi_capital,
        ];
        FactorSnapshot::new(self.output(inputs), prices)
    }
}
