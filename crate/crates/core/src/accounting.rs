//! Family-independent income accounting: total income, productivity, the
//! power shift index and its normalization between limit endpoints.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::types::{DistributionReading, Factor, FactorInputs, FactorSnapshot};

/// Scale applied to one side's inputs when probing the normalization limits.
pub const LIMIT_EPSILON: f64 = 1e-9;

/// Below this endpoint separation the normalization is treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// A share clamped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Share {
    pub value: f64,
    /// True when the unclamped value fell outside `[0, 1]`.
    pub clamped: bool,
}

impl Share {
    pub fn clamp(raw: f64) -> Share {
        let value = raw.clamp(0.0, 1.0);
        Share {
            value,
            clamped: value != raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalized {
    pub value: f64,
    pub degenerate: bool,
}

/// `w_L·L + w_agi·L_agi + r_K·K + r_K_agi·K_agi`, summed left to right.
pub fn total_income(snapshot: &FactorSnapshot, inputs: &FactorInputs) -> f64 {
    snapshot.wage_labor * inputs.labor
        + snapshot.wage_agi * inputs.agi_labor
        + snapshot.return_capital * inputs.capital
        + snapshot.return_agi_capital * inputs.agi_capital
}

/// Factor income paid to AGI labor and AGI capital.
pub fn agi_income(snapshot: &FactorSnapshot, inputs: &FactorInputs) -> f64 {
    snapshot.wage_agi * inputs.agi_labor + snapshot.return_agi_capital * inputs.agi_capital
}

/// Factor income paid to human labor and human capital.
pub fn human_income(snapshot: &FactorSnapshot, inputs: &FactorInputs) -> f64 {
    snapshot.wage_labor * inputs.labor + snapshot.return_capital * inputs.capital
}

/// Output per unit of total (human + AGI) labor.
pub fn productivity(output: f64, inputs: &FactorInputs) -> Result<f64> {
    let labor = inputs.total_labor();
    if labor == 0.0 {
        return Err(Error::ZeroTotalLabor);
    }
    Ok(output / labor)
}

/// AGI share of a given income split, clamped into `[0, 1]`.
pub fn share_of_income(agi: f64, total: f64) -> Result<Share> {
    if total == 0.0 {
        return Err(Error::ZeroTotalIncome);
    }
    Ok(Share::clamp(agi / total))
}

/// Fraction of total factor income accruing to AGI labor and AGI capital.
///
/// Negative marginal products can push the ratio outside `[0, 1]`; it is then
/// clamped and the returned share is flagged.
pub fn power_shift_raw(snapshot: &FactorSnapshot, inputs: &FactorInputs) -> Result<Share> {
    share_of_income(agi_income(snapshot, inputs), total_income(snapshot, inputs))
}

fn share_at(model: &ModelSpec, inputs: &FactorInputs) -> Result<f64> {
    let snapshot = model.evaluate(inputs)?;
    Ok(power_shift_raw(&snapshot, inputs)?.value)
}

/// Power shift at the two limit points: AGI inputs vanishing (`S_min`) and
/// human inputs vanishing (`S_max`).
pub fn limit_endpoints(model: &ModelSpec, inputs: &FactorInputs) -> Result<(f64, f64)> {
    let mut agi_vanishing = *inputs;
    let mut human_vanishing = *inputs;
    for factor in Factor::ALL {
        let target = if factor.is_agi() {
            &mut agi_vanishing
        } else {
            &mut human_vanishing
        };
        target.set(factor, inputs.get(factor) * LIMIT_EPSILON);
    }
    Ok((
        share_at(model, &agi_vanishing)?,
        share_at(model, &human_vanishing)?,
    ))
}

/// Rescales `s_raw` to `(s_raw - S_min) / (S_max - S_min)`, clamped to `[0, 1]`.
///
/// When the endpoints coincide (the share does not depend on inputs, as for
/// Cobb-Douglas and spillover) the clamped raw share is returned and the
/// result is marked degenerate.
pub fn normalize_power_shift(
    model: &ModelSpec,
    inputs: &FactorInputs,
    s_raw: f64,
) -> Result<Normalized> {
    let (s_min, s_max) = limit_endpoints(model, inputs)?;
    let span = s_max - s_min;
    if span.abs() < DEGENERACY_THRESHOLD {
        return Ok(Normalized {
            value: s_raw.clamp(0.0, 1.0),
            degenerate: true,
        });
    }
    Ok(Normalized {
        value: ((s_raw - s_min) / span).clamp(0.0, 1.0),
        degenerate: false,
    })
}

/// Builds a full reading from a snapshot whose AGI/human incomes may already
/// have been redistributed.
pub(crate) fn reading_from_incomes(
    model: &ModelSpec,
    inputs: &FactorInputs,
    snapshot: &FactorSnapshot,
    agi: f64,
    total: f64,
) -> Result<DistributionReading> {
    let share = share_of_income(agi, total)?;
    let normalized = normalize_power_shift(model, inputs, share.value)?;
    Ok(DistributionReading {
        total_income: total,
        productivity: productivity(snapshot.output, inputs).ok(),
        s_raw: share.value,
        s_norm: normalized.value,
        clamped: share.clamped,
        degenerate_normalization: normalized.degenerate,
    })
}

/// Evaluates the model and derives every accounting quantity at one point.
pub fn read_distribution(
    model: &ModelSpec,
    inputs: &FactorInputs,
) -> Result<(FactorSnapshot, DistributionReading)> {
    let snapshot = model.evaluate(inputs)?;
    let reading = reading_from_incomes(
        model,
        inputs,
        &snapshot,
        agi_income(&snapshot, inputs),
        total_income(&snapshot, inputs),
    )?;
    Ok((snapshot, reading))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{CesParams, Family, LeontiefParams, LinearParams, QuadraticParams};
    use crate::presets::reference_model;

    fn reference_cd_snapshot() -> FactorSnapshot {
        FactorSnapshot::new(1.8, [0.99, 0.54, 0.72, 0.63])
    }

    #[test]
    fn total_income_of_cobb_douglas_snapshot() {
        let y = total_income(&reference_cd_snapshot(), &FactorInputs::unit());
        // (α+β+γ+δ)·Q = 1.6 · 1.8
        assert!((y - 2.88).abs() < 1e-12);
        assert_eq!(
            total_income(&FactorSnapshot::zero(), &FactorInputs::unit()),
            0.0
        );
    }

    #[test]
    fn total_income_of_linear_equals_output() {
        let model = ModelSpec::Linear(LinearParams {
            weights: [1.0, 1.3, 1.0, 1.0],
        });
        let s = model.evaluate(&FactorInputs::unit()).unwrap();
        assert_eq!(total_income(&s, &FactorInputs::unit()), s.output);
        assert_eq!(s.output, 4.3);
    }

    #[test]
    fn productivity_cases() {
        let unit = FactorInputs::unit();
        assert_eq!(productivity(1.8, &unit).unwrap(), 0.9);
        assert_eq!(productivity(0.0, &unit).unwrap(), 0.0);
        let no_labor = FactorInputs::new(0.0, 0.0, 1.0, 1.0);
        assert_eq!(productivity(1.0, &no_labor), Err(Error::ZeroTotalLabor));
    }

    #[test]
    fn power_shift_cases() {
        let s = power_shift_raw(&reference_cd_snapshot(), &FactorInputs::unit()).unwrap();
        assert!((s.value - 0.40625).abs() < 1e-15);
        assert!(!s.clamped);

        let no_agi = FactorInputs::new(1.0, 0.0, 1.0, 0.0);
        let s = power_shift_raw(&reference_cd_snapshot(), &no_agi).unwrap();
        assert_eq!(s.value, 0.0);

        let leontief = ModelSpec::Leontief(LeontiefParams {
            coefficients: [1.0; 4],
            shadow_price: 1.0,
        });
        let inputs = FactorInputs::new(2.0, 3.0, 4.0, 5.0);
        let snap = leontief.evaluate(&inputs).unwrap();
        let s = power_shift_raw(&snap, &inputs).unwrap();
        assert!((s.value - 8.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn zero_income_is_an_error() {
        let model = ModelSpec::Quadratic(QuadraticParams {
            constant: 1.0,
            b: 0.0,
            c: 0.0,
            f: 0.0,
            g: 0.0,
            h: 0.0,
            i: 0.0,
        });
        let s = model.evaluate(&FactorInputs::unit()).unwrap();
        assert_eq!(s.output, 1.0);
        assert_eq!(
            power_shift_raw(&s, &FactorInputs::unit()),
            Err(Error::ZeroTotalIncome)
        );
    }

    #[test]
    fn negative_shares_are_clamped() {
        let snap = FactorSnapshot::new(1.0, [1.0, -1.0, 1.0, 0.0]);
        let s = power_shift_raw(&snap, &FactorInputs::unit()).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(s.clamped);
    }

    #[test]
    fn ces_symmetric_normalization_is_identity_at_half() {
        let model = ModelSpec::Ces(CesParams {
            scale: 1.0,
            shares: [0.25; 4],
            rho: 0.9,
        });
        let (s_min, s_max) = limit_endpoints(&model, &FactorInputs::unit()).unwrap();
        assert!(s_min < 1e-7 && s_max > 1.0 - 1e-7);
        let (_, reading) = read_distribution(&model, &FactorInputs::unit()).unwrap();
        assert!((reading.s_raw - 0.5).abs() < 1e-15);
        assert!((reading.s_norm - 0.5).abs() < 1e-7);
        assert!(!reading.degenerate_normalization);
    }

    #[test]
    fn cobb_douglas_normalization_is_degenerate() {
        let model = reference_model(Family::CobbDouglas);
        let n = normalize_power_shift(&model, &FactorInputs::unit(), 0.40625).unwrap();
        assert!(n.degenerate);
        assert_eq!(n.value, 0.40625);
    }

    #[test]
    fn share_at_lower_endpoint_normalizes_to_zero() {
        let model = ModelSpec::Linear(LinearParams {
            weights: [1.0, 1.3, 1.0, 1.0],
        });
        let inputs = FactorInputs::unit();
        let (s_min, _) = limit_endpoints(&model, &inputs).unwrap();
        let n = normalize_power_shift(&model, &inputs, s_min).unwrap();
        assert_eq!(n.value, 0.0);
    }
}
