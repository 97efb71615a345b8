//! Time evolution: parameter and input ramps, the per-step evaluation loop
//! and policy comparison grids.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::accounting::total_income;
use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec};
use crate::policy::{apply_coop_ownership, apply_policy_stack, PolicyOutcome, PolicySpec};
use crate::types::FactorInputs;

/// Logistic midpoint as a fraction of the horizon.
pub const DEFAULT_MIDPOINT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RampKind {
    Constant,
    Linear,
    /// `steepness` is per step; `None` means `10 / horizon`.
    Logistic {
        midpoint: f64,
        steepness: Option<f64>,
    },
}

/// A schedule from `start` at `t = 0` to `end` at `t = horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ramp {
    pub kind: RampKind,
    pub start: f64,
    pub end: f64,
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Ramp {
    pub fn constant(value: f64) -> Ramp {
        Ramp {
            kind: RampKind::Constant,
            start: value,
            end: value,
        }
    }

    pub fn linear(start: f64, end: f64) -> Ramp {
        Ramp {
            kind: RampKind::Linear,
            start,
            end,
        }
    }

    pub fn logistic(start: f64, end: f64) -> Ramp {
        Ramp {
            kind: RampKind::Logistic {
                midpoint: DEFAULT_MIDPOINT,
                steepness: None,
            },
            start,
            end,
        }
    }

    pub fn logistic_with(start: f64, end: f64, midpoint: f64, steepness: Option<f64>) -> Ramp {
        Ramp {
            kind: RampKind::Logistic {
                midpoint,
                steepness,
            },
            start,
            end,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.kind == RampKind::Constant
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::InvalidRamp("endpoints must be finite".into()));
        }
        match self.kind {
            RampKind::Constant => {
                if self.start != self.end {
                    return Err(Error::InvalidRamp(
                        "constant ramp with distinct endpoints".into(),
                    ));
                }
            }
            RampKind::Linear | RampKind::Logistic { .. } => {
                if self.start == self.end {
                    return Err(Error::InvalidRamp(format!(
                        "non-constant ramp needs start != end (both {})",
                        self.start
                    )));
                }
            }
        }
        if let RampKind::Logistic {
            midpoint,
            steepness,
        } = self.kind
        {
            if !(0.0..=1.0).contains(&midpoint) {
                return Err(Error::InvalidRamp(format!(
                    "logistic midpoint {midpoint} must be a fraction of the horizon in [0, 1]"
                )));
            }
            if let Some(k) = steepness {
                if !(k > 0.0 && k.is_finite()) {
                    return Err(Error::InvalidRamp(format!(
                        "logistic steepness {k} must be > 0"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Fraction of the way from `start` to `end` at step `t`; exactly 0 at
    /// `t = 0` and exactly 1 at `t = horizon`.
    fn progress(&self, t: u32, horizon: u32) -> f64 {
        let (t, horizon) = (f64::from(t), f64::from(horizon));
        match self.kind {
            RampKind::Constant => 0.0,
            RampKind::Linear => t / horizon,
            RampKind::Logistic {
                midpoint,
                steepness,
            } => {
                let k = steepness.unwrap_or(10.0 / horizon);
                let centre = midpoint * horizon;
                let lo = logistic(-k * centre);
                let hi = logistic(k * (horizon - centre));
                (logistic(k * (t - centre)) - lo) / (hi - lo)
            }
        }
    }

    pub fn value_at(&self, t: u32, horizon: u32) -> f64 {
        let f = self.progress(t, horizon);
        (1.0 - f) * self.start + f * self.end
    }
}

/// Free-function form of [`Ramp::value_at`].
pub fn ramp_value(ramp: &Ramp, t: u32, horizon: u32) -> f64 {
    ramp.value_at(t, horizon)
}

/// One family with a ramp per parameter, ordered as [`Family::param_names`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySetup {
    pub family: Family,
    pub params: Vec<Ramp>,
}

impl FamilySetup {
    pub fn constant(model: &ModelSpec) -> FamilySetup {
        FamilySetup {
            family: model.family(),
            params: model.values().into_iter().map(Ramp::constant).collect(),
        }
    }

    pub fn param(&self, name: &str) -> Option<&Ramp> {
        let idx = self.family.param_names().iter().position(|n| *n == name)?;
        self.params.get(idx)
    }

    pub fn set_ramp(&mut self, name: &str, ramp: Ramp) -> Result<()> {
        let idx = self
            .family
            .param_names()
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| {
                Error::InvalidScenario(format!("`{name}` is not a parameter of {}", self.family))
            })?;
        self.params[idx] = ramp;
        Ok(())
    }

    pub fn model_at(&self, t: u32, horizon: u32) -> Result<ModelSpec> {
        let values: Vec<f64> = self.params.iter().map(|r| r.value_at(t, horizon)).collect();
        ModelSpec::from_values(self.family, &values)
    }
}

/// Input trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputPaths {
    pub labor: Ramp,
    pub agi_labor: Ramp,
    pub capital: Ramp,
    pub agi_capital: Ramp,
    pub knowledge_stock: Ramp,
}

impl InputPaths {
    pub fn constant(inputs: &FactorInputs) -> InputPaths {
        InputPaths {
            labor: Ramp::constant(inputs.labor),
            agi_labor: Ramp::constant(inputs.agi_labor),
            capital: Ramp::constant(inputs.capital),
            agi_capital: Ramp::constant(inputs.agi_capital),
            knowledge_stock: Ramp::constant(inputs.knowledge_stock),
        }
    }

    fn ramps(&self) -> [(&'static str, &Ramp); 5] {
        [
            ("L", &self.labor),
            ("L_agi", &self.agi_labor),
            ("K", &self.capital),
            ("K_agi", &self.agi_capital),
            ("knowledge_stock", &self.knowledge_stock),
        ]
    }

    pub fn at(&self, t: u32, horizon: u32) -> FactorInputs {
        FactorInputs {
            labor: self.labor.value_at(t, horizon),
            agi_labor: self.agi_labor.value_at(t, horizon),
            capital: self.capital.value_at(t, horizon),
            agi_capital: self.agi_capital.value_at(t, horizon),
            knowledge_stock: self.knowledge_stock.value_at(t, horizon),
        }
    }
}

/// A named intervention set within a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioPolicy {
    pub id: String,
    pub spec: PolicySpec,
    /// When set, the fixed levy is this fraction of the cell's total income
    /// at `t = 0`, overriding `spec.fixed_levy`.
    pub levy_share_of_initial_income: Option<f64>,
}

impl ScenarioPolicy {
    pub const BASELINE_ID: &'static str = "baseline";

    pub fn new(id: impl Into<String>, spec: PolicySpec) -> Self {
        ScenarioPolicy {
            id: id.into(),
            spec,
            levy_share_of_initial_income: None,
        }
    }

    pub fn baseline() -> Self {
        ScenarioPolicy::new(Self::BASELINE_ID, PolicySpec::default())
    }

    pub fn with_levy_share(mut self, share: f64) -> Self {
        self.levy_share_of_initial_income = Some(share);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub horizon: u32,
    pub families: Vec<FamilySetup>,
    pub inputs: InputPaths,
    /// The first entry is the baseline the others are compared against.
    pub policies: Vec<ScenarioPolicy>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::InvalidScenario("horizon must be at least 1".into()));
        }
        if self.families.is_empty() {
            return Err(Error::InvalidScenario("no families selected".into()));
        }
        let mut seen = BTreeSet::new();
        for setup in &self.families {
            if !seen.insert(setup.family) {
                return Err(Error::InvalidScenario(format!(
                    "family {} listed twice",
                    setup.family
                )));
            }
            if setup.params.len() != setup.family.param_names().len() {
                return Err(Error::InvalidScenario(format!(
                    "{} needs {} parameter ramps",
                    setup.family,
                    setup.family.param_names().len()
                )));
            }
            for (name, ramp) in setup.family.param_names().iter().zip(&setup.params) {
                ramp.validate()
                    .map_err(|e| Error::InvalidScenario(format!("{}.{name}: {e}", setup.family)))?;
            }
        }
        for (name, ramp) in self.inputs.ramps() {
            ramp.validate()
                .map_err(|e| Error::InvalidScenario(format!("inputs.{name}: {e}")))?;
        }
        if self.policies.is_empty() {
            return Err(Error::InvalidScenario(
                "at least one policy is required".into(),
            ));
        }
        let mut ids = BTreeSet::new();
        for policy in &self.policies {
            if !ids.insert(policy.id.as_str()) {
                return Err(Error::InvalidScenario(format!(
                    "policy id `{}` used twice",
                    policy.id
                )));
            }
            policy.spec.validate()?;
            if let Some(share) = policy.levy_share_of_initial_income {
                if !(share >= 0.0 && share.is_finite()) {
                    return Err(Error::NegativeLevy(share));
                }
            }
        }
        Ok(())
    }

    /// The same scenario restricted to its baseline policy.
    pub fn baseline_only(&self) -> Scenario {
        Scenario {
            policies: self.policies.iter().take(1).cloned().collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: u32,
    pub family: Family,
    pub policy: String,
    /// Failed points stay in the trajectory with their error.
    pub outcome: std::result::Result<PolicyOutcome, Error>,
}

/// Total income at `t = 0` for a cell, used to anchor a proportional levy.
fn initial_income(setup: &FamilySetup, scenario: &Scenario, spec: &PolicySpec) -> Result<f64> {
    let model = setup.model_at(0, scenario.horizon)?;
    let inputs = apply_coop_ownership(&scenario.inputs.at(0, scenario.horizon), spec.coop_share)?;
    let snapshot = model.evaluate(&inputs)?;
    Ok(total_income(&snapshot, &inputs))
}

fn run_cell(
    scenario: &Scenario,
    setup: &FamilySetup,
    policy: &ScenarioPolicy,
) -> Vec<TrajectoryPoint> {
    let horizon = scenario.horizon;
    let spec = match policy.levy_share_of_initial_income {
        None => Ok(policy.spec),
        Some(share) => initial_income(setup, scenario, &policy.spec).map(|y0| PolicySpec {
            fixed_levy: (share * y0).max(0.0),
            ..policy.spec
        }),
    };
    (0..=horizon)
        .map(|t| {
            let outcome = spec.clone().and_then(|spec| {
                let model = setup.model_at(t, horizon)?;
                apply_policy_stack(&model, &scenario.inputs.at(t, horizon), &spec)
            });
            TrajectoryPoint {
                t,
                family: setup.family,
                policy: policy.id.clone(),
                outcome,
            }
        })
        .collect()
}

/// Evaluates every family × policy cell over `0..=horizon`.
///
/// Output is ordered by (family as listed, policy as listed, t) regardless of
/// how cells are scheduled across threads.
pub fn run_scenario(scenario: &Scenario) -> Result<Vec<TrajectoryPoint>> {
    scenario.validate()?;
    let cells: Vec<(&FamilySetup, &ScenarioPolicy)> = scenario
        .families
        .iter()
        .flat_map(|setup| scenario.policies.iter().map(move |p| (setup, p)))
        .collect();
    let points = cells
        .par_iter()
        .map(|(setup, policy)| run_cell(scenario, setup, policy))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShareMetric {
    Raw,
    Normalized,
}

impl ShareMetric {
    pub fn label(self) -> &'static str {
        match self {
            ShareMetric::Raw => "S_raw",
            ShareMetric::Normalized => "S_norm",
        }
    }
}

/// One family × policy series aligned on `t = 0..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridColumn {
    pub family: Family,
    pub policy: String,
    pub s_raw: Vec<Option<f64>>,
    pub s_norm: Vec<Option<f64>>,
}

impl GridColumn {
    pub fn series(&self, metric: ShareMetric) -> &[Option<f64>] {
        match metric {
            ShareMetric::Raw => &self.s_raw,
            ShareMetric::Normalized => &self.s_norm,
        }
    }

    /// Value at the last step, if it evaluated.
    pub fn final_value(&self, metric: ShareMetric) -> Option<f64> {
        self.series(metric).last().copied().flatten()
    }

    /// Largest value over the steps that evaluated.
    pub fn max_value(&self, metric: ShareMetric) -> Option<f64> {
        self.series(metric)
            .iter()
            .flatten()
            .copied()
            .reduce(f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGrid {
    pub horizon: u32,
    pub columns: Vec<GridColumn>,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl PolicyGrid {
    pub fn column(&self, family: Family, policy: &str) -> Option<&GridColumn> {
        self.columns
            .iter()
            .find(|c| c.family == family && c.policy == policy)
    }
}

/// Runs the scenario and aligns each family × policy cell into a column.
pub fn run_policy_grid(scenario: &Scenario) -> Result<PolicyGrid> {
    if scenario.policies.len() < 2 {
        return Err(Error::InvalidScenario(
            "a policy grid needs a baseline and at least one intervention".into(),
        ));
    }
    let trajectory = run_scenario(scenario)?;
    let steps = scenario.horizon as usize + 1;
    let columns = trajectory
        .chunks(steps)
        .map(|cell| GridColumn {
            family: cell[0].family,
            policy: cell[0].policy.clone(),
            s_raw: cell
                .iter()
                .map(|p| p.outcome.as_ref().ok().map(|o| o.reading.s_raw))
                .collect(),
            s_norm: cell
                .iter()
                .map(|p| p.outcome.as_ref().ok().map(|o| o.reading.s_norm))
                .collect(),
        })
        .collect();
    Ok(PolicyGrid {
        horizon: scenario.horizon,
        columns,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{reference_scenario, reference_setup};

    #[test]
    fn linear_ramp_endpoints_and_midpoint() {
        let r = Ramp::linear(0.3, 0.85);
        assert_eq!(ramp_value(&r, 0, 100), 0.3);
        assert_eq!(ramp_value(&r, 100, 100), 0.85);
        assert!((ramp_value(&r, 50, 100) - 0.575).abs() < 1e-15);
    }

    #[test]
    fn logistic_ramp_endpoints_and_midpoint() {
        let r = Ramp::logistic(0.1, 10.0);
        assert_eq!(r.value_at(0, 100), 0.1);
        assert_eq!(r.value_at(100, 100), 10.0);
        assert!((r.value_at(50, 100) - 5.05).abs() < 1e-12);
        let shifted = Ramp::logistic_with(0.0, 1.0, 0.3, Some(0.5));
        assert_eq!(shifted.value_at(0, 10), 0.0);
        assert_eq!(shifted.value_at(10, 10), 1.0);
        assert!((shifted.value_at(3, 10) - 0.5).abs() > 1e-3);
    }

    #[test]
    fn ramp_validation() {
        assert!(Ramp::linear(1.0, 1.0).validate().is_err());
        assert!(Ramp::logistic_with(0.0, 1.0, 0.5, Some(0.0))
            .validate()
            .is_err());
        assert!(Ramp::logistic_with(0.0, 1.0, 1.5, None).validate().is_err());
        assert!(Ramp::constant(2.0).validate().is_ok());
    }

    #[test]
    fn unit_horizon_gives_two_points_per_cell() {
        let mut s = reference_scenario();
        s.horizon = 1;
        let points = run_scenario(&s).unwrap();
        assert_eq!(points.len(), 2 * s.families.len() * s.policies.len());
    }

    #[test]
    fn cobb_douglas_trajectory_endpoints() {
        let mut s = reference_scenario().baseline_only();
        s.families = vec![reference_setup(Family::CobbDouglas)];
        let points = run_scenario(&s).unwrap();
        let first = points[0].outcome.as_ref().unwrap();
        let last = points.last().unwrap().outcome.as_ref().unwrap();
        assert!((first.reading.s_raw - 0.40625).abs() <= 1e-12 * 0.40625);
        assert!((last.reading.s_raw - 1.6 / 2.55).abs() <= 1e-9);
    }

    #[test]
    fn unknown_parameter_is_rejected() {
        let mut setup = reference_setup(Family::Linear);
        assert!(setup.set_ramp("beta", Ramp::linear(0.0, 1.0)).is_err());
    }

    #[test]
    fn policy_grid_needs_two_policies() {
        let s = reference_scenario().baseline_only();
        assert!(matches!(
            run_policy_grid(&s),
            Err(Error::InvalidScenario(_))
        ));
    }

    #[test]
    fn failed_points_are_recorded_in_line() {
        let mut s = reference_scenario().baseline_only();
        s.families = vec![reference_setup(Family::Ces)];
        // Drives L_agi through zero at the last step.
        s.inputs.agi_labor = Ramp::linear(1.0, 0.0);
        let points = run_scenario(&s).unwrap();
        assert_eq!(points.len(), 101);
        assert!(points[..100].iter().all(|p| p.outcome.is_ok()));
        assert!(matches!(points[100].outcome, Err(Error::Domain { .. })));
    }
}
