//! Power-product families: Cobb-Douglas and its translog, Von Thünen and
//! spillover generalisations. All require strictly positive inputs.

use serde::Serialize;

use super::{require_positive, Family};
use crate::error::{Error, Result};
use crate::types::{FactorInputs, FactorSnapshot};

/// Output elasticities of (L, L_agi, K, K_agi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Elasticities {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Elasticities {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Elasticities {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// Degree of homogeneity of the plain power product.
    pub fn sum(&self) -> f64 {
        self.alpha + self.beta + self.gamma + self.delta
    }

    /// `(β + δ) / (α + β + γ + δ)`: the AGI income share of a power product.
    pub fn agi_share(&self) -> f64 {
        (self.beta + self.delta) / self.sum()
    }

    fn power_product(&self, inputs: &FactorInputs) -> f64 {
        inputs.labor.powf(self.alpha)
            * inputs.agi_labor.powf(self.beta)
            * inputs.capital.powf(self.gamma)
            * inputs.agi_capital.powf(self.delta)
    }

    /// Prices `e_i · Q / x_i`.
    fn prices(&self, output: f64, inputs: &FactorInputs) -> [f64; 4] {
        let e = self.as_array();
        let x = inputs.as_array();
        [
            e[0] * output / x[0],
            e[1] * output / x[1],
            e[2] * output / x[2],
            e[3] * output / x[3],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CobbDouglasParams {
    pub scale: f64,
    pub elasticities: Elasticities,
}

impl CobbDouglasParams {
    pub(super) fn output(&self, inputs: &FactorInputs) -> Result<f64> {
        require_positive(Family::CobbDouglas, inputs)?;
        Ok(self.scale * self.elasticities.power_product(inputs))
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> Result<FactorSnapshot> {
        let q = self.output(inputs)?;
        Ok(FactorSnapshot::new(q, self.elasticities.prices(q, inputs)))
    }
}

/// `ln Q = A + Σ e_i ln x_i + Σ λ_i (ln x_i)² + λ5 lnL lnL_agi + λ6 lnK lnK_agi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranslogParams {
    /// Additive constant of `ln Q`, so the level multiplier is `exp(log_scale)`.
    pub log_scale: f64,
    pub elasticities: Elasticities,
    pub lambda: [f64; 6],
}

impl TranslogParams {
    fn logs(inputs: &FactorInputs) -> [f64; 4] {
        inputs.as_array().map(f64::ln)
    }

    fn log_output(&self, ln: &[f64; 4]) -> f64 {
        let e = self.elasticities.as_array();
        let l = &self.lambda;
        self.log_scale
            + e[0] * ln[0]
            + e[1] * ln[1]
            + e[2] * ln[2]
            + e[3] * ln[3]
            + l[0] * ln[0] * ln[0]
            + l[1] * ln[1] * ln[1]
            + l[2] * ln[2] * ln[2]
            + l[3] * ln[3] * ln[3]
            + l[4] * ln[0] * ln[1]
            + l[5] * ln[2] * ln[3]
    }

    /// `∂ ln Q / ∂ ln x_i` for each factor.
    pub fn output_elasticities(&self, inputs: &FactorInputs) -> [f64; 4] {
        let ln = Self::logs(inputs);
        let e = self.elasticities.as_array();
        let l = &self.lambda;
        [
            e[0] + 2.0 * l[0] * ln[0] + l[4] * ln[1],
            e[1] + 2.0 * l[1] * ln[1] + l[4] * ln[0],
            e[2] + 2.0 * l[2] * ln[2] + l[5] * ln[3],
            e[3] + 2.0 * l[3] * ln[3] + l[5] * ln[2],
        ]
    }

    pub(super) fn output(&self, inputs: &FactorInputs) -> Result<f64> {
        require_positive(Family::Translog, inputs)?;
        Ok(self.log_output(&Self::logs(inputs)).exp())
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> Result<FactorSnapshot> {
        let q = self.output(inputs)?;
        let eps = self.output_elasticities(inputs);
        let x = inputs.as_array();
        // ∂Q/∂x = (Q / x) · ∂lnQ/∂lnx
        let prices = [
            q / x[0] * eps[0],
            q / x[1] * eps[1],
            q / x[2] * eps[2],
            q / x[3] * eps[3],
        ];
        Ok(FactorSnapshot::new(q, prices))
    }
}

/// Cobb-Douglas with exponential decay in both labor inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VonThunenParams {
    pub scale: f64,
    pub elasticities: Elasticities,
    /// Decay rate on human labor.
    pub c_decay: f64,
    /// Decay rate on AGI labor.
    pub d_decay: f64,
}

impl VonThunenParams {
    pub(super) fn output(&self, inputs: &FactorInputs) -> Result<f64> {
        require_positive(Family::VonThunen, inputs)?;
        let decay = (-self.c_decay * inputs.labor - self.d_decay * inputs.agi_labor).exp();
        Ok(self.scale * self.elasticities.power_product(inputs) * decay)
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> Result<FactorSnapshot> {
        let q = self.output(inputs)?;
        let e = &self.elasticities;
        let prices = [
            q * (e.alpha / inputs.labor - self.c_decay),
            q * (e.beta / inputs.agi_labor - self.d_decay),
            e.gamma * q / inputs.capital,
            e.delta * q / inputs.agi_capital,
        ];
        Ok(FactorSnapshot::new(q, prices))
    }
}

/// Cobb-Douglas scaled by `knowledge_stock^θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpilloverParams {
    pub scale: f64,
    pub elasticities: Elasticities,
    pub theta: f64,
}

impl SpilloverParams {
    pub(super) fn output(&self, inputs: &FactorInputs) -> Result<f64> {
        require_positive(Family::Spillover, inputs)?;
        if inputs.knowledge_stock <= 0.0 {
            return Err(Error::InvalidInputs(format!(
                "spillover: knowledge_stock = {} must be > 0",
                inputs.knowledge_stock
            )));
        }
        let spill = inputs.knowledge_stock.powf(self.theta);
        Ok(self.scale * self.elasticities.power_product(inputs) * spill)
    }

    pub(super) fn evaluate(&self, inputs: &FactorInputs) -> Result<FactorSnapshot> {
        let q = self.output(inputs)?;
        Ok(FactorSnapshot::new(q, self.elasticities.prices(q, inputs)))
    }
}
