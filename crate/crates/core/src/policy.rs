//! Redistribution mechanisms applied to factor-income accounting.
//!
//! Stages run in a fixed order: cooperative ownership changes who owns AGI
//! capital before the model is evaluated; proportional tax, the universal AI
//! dividend and the fixed levy then move realized income from the AGI side to
//! the human side. Every income stage conserves total income.

use serde::Serialize;

use crate::accounting::{agi_income, human_income, reading_from_incomes};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::types::{DistributionReading, FactorInputs, FactorSnapshot};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PolicySpec {
    /// Share of AGI income taxed and transferred, in `[0, 1)`.
    pub proportional_tax: f64,
    /// Fixed amount of AGI income transferred per step, `>= 0`.
    pub fixed_levy: f64,
    /// Universal AI dividend rate, in `[0, 1)`.
    pub uad_rate: f64,
    /// Share of AGI capital moved into human ownership, in `[0, 1]`.
    pub coop_share: f64,
}

impl PolicySpec {
    /// Tax, dividend and cooperative rates used in the reference simulations;
    /// no fixed levy.
    pub fn full_stack() -> Self {
        PolicySpec {
            proportional_tax: 0.25,
            fixed_levy: 0.0,
            uad_rate: 0.15,
            coop_share: 0.20,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == PolicySpec::default()
    }

    pub fn validate(&self) -> Result<()> {
        check_open_rate("proportional_tax", self.proportional_tax)?;
        check_open_rate("uad_rate", self.uad_rate)?;
        if !(0.0..=1.0).contains(&self.coop_share) {
            return Err(Error::RateOutOfRange {
                name: "coop_share",
                value: self.coop_share,
                range: "[0, 1]",
            });
        }
        if !(self.fixed_levy >= 0.0 && self.fixed_levy.is_finite()) {
            return Err(Error::NegativeLevy(self.fixed_levy));
        }
        Ok(())
    }
}

fn check_open_rate(name: &'static str, rate: f64) -> Result<()> {
    if (0.0..1.0).contains(&rate) {
        Ok(())
    } else {
        Err(Error::RateOutOfRange {
            name,
            value: rate,
            range: "[0, 1)",
        })
    }
}

/// AGI-side and human-side income after a transfer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncomeSplit {
    pub agi: f64,
    pub human: f64,
}

impl IncomeSplit {
    pub fn total(&self) -> f64 {
        self.agi + self.human
    }

    fn transfer(self, amount: f64) -> IncomeSplit {
        IncomeSplit {
            agi: self.agi - amount,
            human: self.human + amount,
        }
    }
}

/// Moves `coop_share` of AGI capital into human ownership. Labor inputs and
/// the capital total are unchanged.
pub fn apply_coop_ownership(inputs: &FactorInputs, coop_share: f64) -> Result<FactorInputs> {
    if !(0.0..=1.0).contains(&coop_share) {
        return Err(Error::RateOutOfRange {
            name: "coop_share",
            value: coop_share,
            range: "[0, 1]",
        });
    }
    if coop_share == 0.0 {
        return Ok(*inputs);
    }
    let moved = coop_share * inputs.agi_capital;
    Ok(FactorInputs {
        capital: inputs.capital + moved,
        agi_capital: inputs.agi_capital - moved,
        ..*inputs
    })
}

/// Transfers `tax · agi` to the human side. Negative AGI income is not taxed.
pub fn apply_proportional_tax(split: IncomeSplit, tax: f64) -> Result<IncomeSplit> {
    check_open_rate("proportional_tax", tax)?;
    Ok(split.transfer(tax * split.agi.max(0.0)))
}

/// Universal AI dividend: redistributes `uad_rate · agi` to the human side.
/// Negative AGI income funds no dividend.
pub fn apply_uad(split: IncomeSplit, uad_rate: f64) -> Result<IncomeSplit> {
    check_open_rate("uad_rate", uad_rate)?;
    Ok(split.transfer(uad_rate * split.agi.max(0.0)))
}

/// Transfers a fixed amount, never pushing AGI income below zero.
pub fn apply_fixed_levy(split: IncomeSplit, levy: f64) -> Result<IncomeSplit> {
    if !(levy >= 0.0 && levy.is_finite()) {
        return Err(Error::NegativeLevy(levy));
    }
    Ok(split.transfer(levy.min(split.agi.max(0.0))))
}

/// Everything recorded for one policed evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyOutcome {
    /// Snapshot at the post-cooperative inputs.
    pub snapshot: FactorSnapshot,
    pub reading: DistributionReading,
    /// Pre-transfer incomes.
    pub market: IncomeSplit,
    /// Post-transfer incomes.
    pub policed: IncomeSplit,
}

/// Runs the full stack: coop, evaluate, proportional tax, UAD, fixed levy.
pub fn apply_policy_stack(
    model: &ModelSpec,
    inputs: &FactorInputs,
    spec: &PolicySpec,
) -> Result<PolicyOutcome> {
    spec.validate()?;
    let owned = apply_coop_ownership(inputs, spec.coop_share)?;
    let snapshot = model.evaluate(&owned)?;
    let market = IncomeSplit {
        agi: agi_income(&snapshot, &owned),
        human: human_income(&snapshot, &owned),
    };
    let taxed = apply_proportional_tax(market, spec.proportional_tax)?;
    let dividend = apply_uad(taxed, spec.uad_rate)?;
    let policed = apply_fixed_levy(dividend, spec.fixed_levy)?;
    // Total is taken before transfers so rounding in the stages cannot leak
    // into the denominator.
    let total = crate::accounting::total_income(&snapshot, &owned);
    let reading = reading_from_incomes(model, &owned, &snapshot, policed.agi, total)?;
    Ok(PolicyOutcome {
        snapshot,
        reading,
        market,
        policed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accounting::read_distribution;
    use crate::models::{Family, LinearParams};
    use crate::presets::reference_model;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn linear() -> ModelSpec {
        ModelSpec::Linear(LinearParams {
            weights: [1.0, 1.3, 1.0, 1.0],
        })
    }

    #[test]
    fn coop_transfers_capital() {
        let moved = apply_coop_ownership(&FactorInputs::unit(), 0.2).unwrap();
        assert!(close(moved.capital, 1.2, 1e-15));
        assert!(close(moved.agi_capital, 0.8, 1e-15));
        assert_eq!(moved.labor, 1.0);
        assert_eq!(moved.agi_labor, 1.0);
        assert_eq!(
            apply_coop_ownership(&FactorInputs::unit(), 0.0).unwrap(),
            FactorInputs::unit()
        );
        assert!(apply_coop_ownership(&FactorInputs::unit(), 1.5).is_err());
    }

    #[test]
    fn coop_on_linear_lowers_share() {
        let spec = PolicySpec {
            coop_share: 0.2,
            ..PolicySpec::default()
        };
        let out = apply_policy_stack(&linear(), &FactorInputs::unit(), &spec).unwrap();
        assert!(close(out.market.agi, 2.1, 1e-15));
        assert!(close(out.reading.total_income, 4.3, 1e-15));
        assert!(close(out.reading.s_raw, 0.488_372_093, 1e-9));
    }

    #[test]
    fn proportional_tax_cases() {
        let split = IncomeSplit {
            agi: 1.17,
            human: 1.71,
        };
        let taxed = apply_proportional_tax(split, 0.25).unwrap();
        assert!(close(taxed.agi, 0.8775, 1e-15));
        assert!(close(taxed.human, 2.0025, 1e-15));
        assert!(close(taxed.total(), 2.88, 1e-15));
        assert_eq!(apply_proportional_tax(split, 0.0).unwrap(), split);
        assert!(matches!(
            apply_proportional_tax(split, 1.0),
            Err(Error::RateOutOfRange { .. })
        ));

        let s = IncomeSplit {
            agi: 0.40625,
            human: 0.59375,
        };
        let s2 = apply_proportional_tax(s, 0.25).unwrap();
        assert_eq!(s2.agi / s2.total(), 0.3046875);
    }

    #[test]
    fn uad_cases() {
        let s = IncomeSplit {
            agi: 0.5,
            human: 0.5,
        };
        let out = apply_uad(s, 0.15).unwrap();
        assert!(close(out.agi / out.total(), 0.425, 1e-15));
        assert_eq!(apply_uad(s, 0.0).unwrap(), s);
        assert!(apply_uad(s, -0.1).is_err());

        let cd = IncomeSplit {
            agi: 0.40625,
            human: 0.59375,
        };
        let both = apply_uad(apply_proportional_tax(cd, 0.25).unwrap(), 0.15).unwrap();
        assert!(close(both.agi / both.total(), 0.85 * 0.75 * 0.40625, 1e-15));
        assert!(close(both.agi / both.total(), 0.258_984_375, 1e-15));
    }

    #[test]
    fn fixed_levy_cases() {
        let s = IncomeSplit {
            agi: 2.3,
            human: 2.0,
        };
        let out = apply_fixed_levy(s, 0.5).unwrap();
        assert!(close(out.agi, 1.8, 1e-15));
        assert!(close(out.agi / out.total(), 0.418_604_651, 1e-9));
        assert_eq!(apply_fixed_levy(s, 0.0).unwrap(), s);

        let floored = apply_fixed_levy(s, 10.0).unwrap();
        assert_eq!(floored.agi, 0.0);
        assert!(close(floored.human, 4.3, 1e-15));
        assert_eq!(apply_fixed_levy(s, -1.0), Err(Error::NegativeLevy(-1.0)));

        let negative = IncomeSplit {
            agi: -1.0,
            human: 3.0,
        };
        assert_eq!(apply_fixed_levy(negative, 0.5).unwrap(), negative);
        assert_eq!(apply_proportional_tax(negative, 0.25).unwrap(), negative);
        assert_eq!(apply_uad(negative, 0.15).unwrap(), negative);
    }

    #[test]
    fn empty_stack_matches_unpoliced_reading() {
        for family in Family::ALL {
            let model = reference_model(family);
            let inputs = FactorInputs::new(1.3, 0.7, 2.1, 0.9);
            let (snap, reading) = read_distribution(&model, &inputs).unwrap();
            let out = apply_policy_stack(&model, &inputs, &PolicySpec::default()).unwrap();
            assert_eq!(out.snapshot, snap, "{family}");
            assert_eq!(out.reading, reading, "{family}");
        }
    }

    #[test]
    fn full_stack_on_cobb_douglas_and_linear() {
        let cd = reference_model(Family::CobbDouglas);
        let out =
            apply_policy_stack(&cd, &FactorInputs::unit(), &PolicySpec::full_stack()).unwrap();
        assert!(close(out.reading.s_raw, 0.75 * 0.85 * 0.40625, 1e-14));
        assert!(out.reading.degenerate_normalization);

        let out = apply_policy_stack(&linear(), &FactorInputs::unit(), &PolicySpec::full_stack())
            .unwrap();
        assert!(close(out.reading.s_raw, 0.75 * 0.85 * 2.1 / 4.3, 1e-14));
        assert!(close(out.reading.s_raw, 0.311_337, 1e-6));
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let spec = PolicySpec {
            fixed_levy: -0.1,
            ..PolicySpec::default()
        };
        assert_eq!(spec.validate(), Err(Error::NegativeLevy(-0.1)));
        let spec = PolicySpec {
            uad_rate: 1.0,
            ..PolicySpec::default()
        };
        assert!(spec.validate().is_err());
    }
}
