//! The ten production-function families behind one evaluation interface.
//!
//! Every family exposes two routes: [`ModelSpec::output`] computes `Q` only, and
//! [`ModelSpec::evaluate`] returns `Q` together with the analytic marginal
//! products. The finite-difference oracle only ever uses the first route.

mod ces;
mod multiplicative;
mod polynomial;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{Factor, FactorInputs, FactorSnapshot};

pub use ces::{CesParams, HybridParams, PowerParams};
pub use multiplicative::{
    CobbDouglasParams, Elasticities, SpilloverParams, TranslogParams, VonThunenParams,
};
pub use polynomial::{LeontiefParams, LinearParams, QuadraticParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    CobbDouglas,
    Leontief,
    Ces,
    Linear,
    Quadratic,
    Translog,
    VonThunen,
    Spillover,
    Power,
    Hybrid,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::CobbDouglas,
        Family::Leontief,
        Family::Ces,
        Family::Linear,
        Family::Quadratic,
        Family::Translog,
        Family::VonThunen,
        Family::Spillover,
        Family::Power,
        Family::Hybrid,
    ];

    /// Config namespace and CSV label.
    pub fn name(self) -> &'static str {
        match self {
            Family::CobbDouglas => "cobb_douglas",
            Family::Leontief => "leontief",
            Family::Ces => "ces",
            Family::Linear => "linear",
            Family::Quadratic => "quadratic",
            Family::Translog => "translog",
            Family::VonThunen => "vonthunen",
            Family::Spillover => "spillover",
            Family::Power => "power",
            Family::Hybrid => "hybrid",
        }
    }

    /// Parameter names in the order used by [`ModelSpec::from_values`] and
    /// [`ModelSpec::values`]. These are also the accepted config keys.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::CobbDouglas => &["A", "alpha", "beta", "gamma", "delta"],
            Family::Leontief => &["a", "b", "c", "d", "shadow_price"],
            Family::Ces => &["A", "delta1", "delta2", "delta3", "delta4", "rho"],
            Family::Linear => &["a", "b", "c", "d"],
            Family::Quadratic => &["A", "b", "c", "f", "g", "h", "i"],
            Family::Translog => &[
                "A", "alpha", "beta", "gamma", "delta", "lambda1", "lambda2", "lambda3", "lambda4",
                "lambda5", "lambda6",
            ],
            Family::VonThunen => &["A", "alpha", "beta", "gamma", "delta", "c_decay", "d_decay"],
            Family::Spillover => &["A", "alpha", "beta", "gamma", "delta", "theta"],
            Family::Power => &["A", "p"],
            Family::Hybrid => &["A", "lambda", "mu", "rho"],
        }
    }

    /// Leontief is the only family with a kinked (non-differentiable) output.
    pub fn is_differentiable(self) -> bool {
        self != Family::Leontief
    }

    /// Whether `S` is independent of the inputs, which collapses the
    /// normalization endpoints onto each other.
    pub fn has_input_independent_share(self) -> bool {
        matches!(self, Family::CobbDouglas | Family::Spillover)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

/// A fully parameterized production function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ModelSpec {
    CobbDouglas(CobbDouglasParams),
    Leontief(LeontiefParams),
    Ces(CesParams),
    Linear(LinearParams),
    Quadratic(QuadraticParams),
    Translog(TranslogParams),
    VonThunen(VonThunenParams),
    Spillover(SpilloverParams),
    Power(PowerParams),
    Hybrid(HybridParams),
}

impl ModelSpec {
    pub fn family(&self) -> Family {
        match self {
            ModelSpec::CobbDouglas(_) => Family::CobbDouglas,
            ModelSpec::Leontief(_) => Family::Leontief,
            ModelSpec::Ces(_) => Family::Ces,
            ModelSpec::Linear(_) => Family::Linear,
            ModelSpec::Quadratic(_) => Family::Quadratic,
            ModelSpec::Translog(_) => Family::Translog,
            ModelSpec::VonThunen(_) => Family::VonThunen,
            ModelSpec::Spillover(_) => Family::Spillover,
            ModelSpec::Power(_) => Family::Power,
            ModelSpec::Hybrid(_) => Family::Hybrid,
        }
    }

    /// Builds and validates a model from values ordered as
    /// [`Family::param_names`].
    pub fn from_values(family: Family, values: &[f64]) -> Result<ModelSpec> {
        let names = family.param_names();
        if values.len() != names.len() {
            return Err(Error::InvalidScenario(format!(
                "{family} expects {} parameters, got {}",
                names.len(),
                values.len()
            )));
        }
        let v = values;
        let model = match family {
            Family::CobbDouglas => ModelSpec::CobbDouglas(CobbDouglasParams {
                scale: v[0],
                elasticities: Elasticities::new(v[1], v[2], v[3], v[4]),
            }),
            Family::Leontief => ModelSpec::Leontief(LeontiefParams {
                coefficients: [v[0], v[1], v[2], v[3]],
                shadow_price: v[4],
            }),
            Family::Ces => ModelSpec::Ces(CesParams {
                scale: v[0],
                shares: [v[1], v[2], v[3], v[4]],
                rho: v[5],
            }),
            Family::Linear => ModelSpec::Linear(LinearParams {
                weights: [v[0], v[1], v[2], v[3]],
            }),
            Family::Quadratic => ModelSpec::Quadratic(QuadraticParams {
                constant: v[0],
                b: v[1],
                c: v[2],
                f: v[3],
                g: v[4],
                h: v[5],
                i: v[6],
            }),
            Family::Translog => ModelSpec::Translog(TranslogParams {
                log_scale: v[0],
                elasticities: Elasticities::new(v[1], v[2], v[3], v[4]),
                lambda: [v[5], v[6], v[7], v[8], v[9], v[10]],
            }),
            Family::VonThunen => ModelSpec::VonThunen(VonThunenParams {
                scale: v[0],
                elasticities: Elasticities::new(v[1], v[2], v[3], v[4]),
                c_decay: v[5],
                d_decay: v[6],
            }),
            Family::Spillover => ModelSpec::Spillover(SpilloverParams {
                scale: v[0],
                elasticities: Elasticities::new(v[1], v[2], v[3], v[4]),
                theta: v[5],
            }),
            Family::Power => ModelSpec::Power(PowerParams {
                scale: v[0],
                p: v[1],
            }),
            Family::Hybrid => ModelSpec::Hybrid(HybridParams {
                scale: v[0],
                lambda: v[1],
                mu: v[2],
                rho: v[3],
            }),
        };
        model.validate()?;
        Ok(model)
    }

    /// Parameter values ordered as [`Family::param_names`].
    pub fn values(&self) -> Vec<f64> {
        match self {
            ModelSpec::CobbDouglas(p) => {
                let mut v = vec![p.scale];
                v.extend(p.elasticities.as_array());
                v
            }
            ModelSpec::Leontief(p) => {
                let mut v = p.coefficients.to_vec();
                v.push(p.shadow_price);
                v
            }
            ModelSpec::Ces(p) => {
                let mut v = vec![p.scale];
                v.extend(p.shares);
                v.push(p.rho);
                v
            }
            ModelSpec::Linear(p) => p.weights.to_vec(),
            ModelSpec::Quadratic(p) => vec![p.constant, p.b, p.c, p.f, p.g, p.h, p.i],
            ModelSpec::Translog(p) => {
                let mut v = vec![p.log_scale];
                v.extend(p.elasticities.as_array());
                v.extend(p.lambda);
                v
            }
            ModelSpec::VonThunen(p) => {
                let mut v = vec![p.scale];
                v.extend(p.elasticities.as_array());
                v.extend([p.c_decay, p.d_decay]);
                v
            }
            ModelSpec::Spillover(p) => {
                let mut v = vec![p.scale];
                v.extend(p.elasticities.as_array());
                v.push(p.theta);
                v
            }
            ModelSpec::Power(p) => vec![p.scale, p.p],
            ModelSpec::Hybrid(p) => vec![p.scale, p.lambda, p.mu, p.rho],
        }
    }

    /// Checks parameter invariants.
    pub fn validate(&self) -> Result<()> {
        let family = self.family();
        for (name, value) in family.param_names().iter().zip(self.values()) {
            if !value.is_finite() {
                return Err(param_err(family, name, "must be finite"));
            }
        }
        match self {
            ModelSpec::CobbDouglas(p) => positive_scale(family, p.scale),
            ModelSpec::Leontief(p) => p.validate(),
            ModelSpec::Ces(p) => p.validate(),
            ModelSpec::Linear(_) | ModelSpec::Quadratic(_) | ModelSpec::Translog(_) => Ok(()),
            ModelSpec::VonThunen(p) => positive_scale(family, p.scale),
            ModelSpec::Spillover(p) => positive_scale(family, p.scale),
            ModelSpec::Power(p) => p.validate(),
            ModelSpec::Hybrid(p) => p.validate(),
        }
    }

    /// Output `Q` only. Never touches derivative code.
    pub fn output(&self, inputs: &FactorInputs) -> Result<f64> {
        inputs.validate()?;
        let q = match self {
            ModelSpec::CobbDouglas(p) => p.output(inputs)?,
            ModelSpec::Leontief(p) => p.output(inputs),
            ModelSpec::Ces(p) => p.output(inputs)?,
            ModelSpec::Linear(p) => p.output(inputs),
            ModelSpec::Quadratic(p) => p.output(inputs),
            ModelSpec::Translog(p) => p.output(inputs)?,
            ModelSpec::VonThunen(p) => p.output(inputs)?,
            ModelSpec::Spillover(p) => p.output(inputs)?,
            ModelSpec::Power(p) => p.output(inputs)?,
            ModelSpec::Hybrid(p) => p.output(inputs)?,
        };
        if !q.is_finite() {
            return Err(Error::NonFinite {
                family: self.family(),
            });
        }
        Ok(q)
    }

    /// Output together with analytic marginal products.
    pub fn evaluate(&self, inputs: &FactorInputs) -> Result<FactorSnapshot> {
        inputs.validate()?;
        let snapshot = match self {
            ModelSpec::CobbDouglas(p) => p.evaluate(inputs)?,
            ModelSpec::Leontief(p) => p.evaluate(inputs),
            ModelSpec::Ces(p) => p.evaluate(inputs)?,
            ModelSpec::Linear(p) => p.evaluate(inputs),
            ModelSpec::Quadratic(p) => p.evaluate(inputs),
            ModelSpec::Translog(p) => p.evaluate(inputs)?,
            ModelSpec::VonThunen(p) => p.evaluate(inputs)?,
            ModelSpec::Spillover(p) => p.evaluate(inputs)?,
            ModelSpec::Power(p) => p.evaluate(inputs)?,
            ModelSpec::Hybrid(p) => p.evaluate(inputs)?,
        };
        if !snapshot.is_finite() {
            return Err(Error::NonFinite {
                family: self.family(),
            });
        }
        Ok(snapshot)
    }
}

fn param_err(family: Family, name: &'static str, reason: &str) -> Error {
    Error::Param {
        family,
        name,
        reason: reason.to_string(),
    }
}

fn positive_scale(family: Family, scale: f64) -> Result<()> {
    if scale > 0.0 {
        Ok(())
    } else {
        Err(param_err(family, "A", "must be > 0"))
    }
}

/// Rejects any factor input that is not strictly positive.
fn require_positive(family: Family, inputs: &FactorInputs) -> Result<()> {
    for factor in Factor::ALL {
        let value = inputs.get(factor);
        if value <= 0.0 {
            return Err(Error::Domain {
                family,
                factor,
                value,
            });
        }
    }
    Ok(())
}
