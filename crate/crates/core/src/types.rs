use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// One of the four priced production factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Factor {
    Labor,
    AgiLabor,
    Capital,
    AgiCapital,
}

impl Factor {
    pub const ALL: [Factor; 4] = [
        Factor::Labor,
        Factor::AgiLabor,
        Factor::Capital,
        Factor::AgiCapital,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Whether income paid to this factor accrues to the AGI side of the ledger.
    pub fn is_agi(self) -> bool {
        matches!(self, Factor::AgiLabor | Factor::AgiCapital)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Factor::Labor => "L",
            Factor::AgiLabor => "L_agi",
            Factor::Capital => "K",
            Factor::AgiCapital => "K_agi",
        }
    }

    pub fn price_symbol(self) -> &'static str {
        match self {
            Factor::Labor => "w_L",
            Factor::AgiLabor => "w_agi",
            Factor::Capital => "r_K",
            Factor::AgiCapital => "r_K_agi",
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Production inputs at one point in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorInputs {
    pub labor: f64,
    pub agi_labor: f64,
    pub capital: f64,
    pub agi_capital: f64,
    /// Diffusion stock; only the spillover family reads it.
    pub knowledge_stock: f64,
}

impl Default for FactorInputs {
    fn default() -> Self {
        FactorInputs::unit()
    }
}

impl FactorInputs {
    pub fn new(labor: f64, agi_labor: f64, capital: f64, agi_capital: f64) -> Self {
        FactorInputs {
            labor,
            agi_labor,
            capital,
            agi_capital,
            knowledge_stock: 1.0,
        }
    }

    pub fn unit() -> Self {
        FactorInputs::new(1.0, 1.0, 1.0, 1.0)
    }

    pub fn with_knowledge_stock(mut self, stock: f64) -> Self {
        self.knowledge_stock = stock;
        self
    }

    pub fn get(&self, factor: Factor) -> f64 {
        match factor {
            Factor::Labor => self.labor,
            Factor::AgiLabor => self.agi_labor,
            Factor::Capital => self.capital,
            Factor::AgiCapital => self.agi_capital,
        }
    }

    pub fn set(&mut self, factor: Factor, value: f64) {
        match factor {
            Factor::Labor => self.labor = value,
            Factor::AgiLabor => self.agi_labor = value,
            Factor::Capital => self.capital = value,
            Factor::AgiCapital => self.agi_capital = value,
        }
    }

    pub fn with(mut self, factor: Factor, value: f64) -> Self {
        self.set(factor, value);
        self
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.labor, self.agi_labor, self.capital, self.agi_capital]
    }

    /// Multiplies every factor (not the knowledge stock) by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        FactorInputs {
            labor: self.labor * t,
            agi_labor: self.agi_labor * t,
            capital: self.capital * t,
            agi_capital: self.agi_capital * t,
            knowledge_stock: self.knowledge_stock,
        }
    }

    pub fn total_labor(&self) -> f64 {
        self.labor + self.agi_labor
    }

    /// Checks the finite, non-negative invariant.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("L", self.labor),
            ("L_agi", self.agi_labor),
            ("K", self.capital),
            ("K_agi", self.agi_capital),
            ("knowledge_stock", self.knowledge_stock),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidInputs(format!(
                    "{name} = {value} must be finite and non-negative"
                )));
            }
        }
        Ok(())
    }
}

/// Output and the four marginal-product factor prices at one input point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorSnapshot {
    pub output: f64,
    pub wage_labor: f64,
    pub wage_agi: f64,
    pub return_capital: f64,
    pub return_agi_capital: f64,
    pub negative_price_flag: bool,
}

impl FactorSnapshot {
    /// Builds a snapshot from output and prices ordered as [`Factor::ALL`].
    pub fn new(output: f64, prices: [f64; 4]) -> Self {
        FactorSnapshot {
            output,
            wage_labor: prices[0],
            wage_agi: prices[1],
            return_capital: prices[2],
            return_agi_capital: prices[3],
            negative_price_flag: prices.iter().any(|&p| p < 0.0),
        }
    }

    pub fn zero() -> Self {
        FactorSnapshot::new(0.0, [0.0; 4])
    }

    pub fn price(&self, factor: Factor) -> f64 {
        match factor {
            Factor::Labor => self.wage_labor,
            Factor::AgiLabor => self.wage_agi,
            Factor::Capital => self.return_capital,
            Factor::AgiCapital => self.return_agi_capital,
        }
    }

    pub fn prices(&self) -> [f64; 4] {
        [
            self.wage_labor,
            self.wage_agi,
            self.return_capital,
            self.return_agi_capital,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.output.is_finite() && self.prices().iter().all(|p| p.is_finite())
    }
}

/// Income distribution summary derived from a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionReading {
    pub total_income: f64,
    /// `None` when total labor is zero.
    pub productivity: Option<f64>,
    pub s_raw: f64,
    pub s_norm: f64,
    pub clamped: bool,
    pub degenerate_normalization: bool,
}
