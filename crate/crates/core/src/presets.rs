//! Reference parameter sets.
//!
//! Values shared across families: productivity coefficient 1.8, elasticities
//! (0.55, 0.3 → 0.85, 0.4, 0.35 → 0.75), CES/hybrid ρ = 0.9, linear AGI-labor
//! weight 1.3, quadratic AGI-labor coefficient 0.7, Von Thünen AGI decay 0.08,
//! hybrid human weight 0.65, spillover θ = 0.45, power exponent 1.5.
//! Everything else (Leontief coefficients, translog second-order terms,
//! human-labor decay, quadratic curvature) is a neutral choice of ours.

use crate::models::{
    CesParams, CobbDouglasParams, Elasticities, Family, HybridParams, LeontiefParams, LinearParams,
    ModelSpec, PowerParams, QuadraticParams, SpilloverParams, TranslogParams, VonThunenParams,
};
use crate::policy::PolicySpec;
use crate::scenario::{FamilySetup, InputPaths, Ramp, Scenario, ScenarioPolicy};

pub const PRODUCTIVITY: f64 = 1.8;
pub const ALPHA: f64 = 0.55;
pub const BETA_START: f64 = 0.3;
pub const BETA_END: f64 = 0.85;
pub const GAMMA: f64 = 0.4;
pub const DELTA_START: f64 = 0.35;
pub const DELTA_END: f64 = 0.75;
pub const RHO: f64 = 0.9;
pub const LINEAR_AGI_WEIGHT: f64 = 1.3;
pub const QUADRATIC_AGI_COEFFICIENT: f64 = 0.7;
pub const VON_THUNEN_AGI_DECAY: f64 = 0.08;
pub const VON_THUNEN_HUMAN_DECAY: f64 = 0.05;
pub const HYBRID_HUMAN_WEIGHT: f64 = 0.65;
pub const SPILLOVER_THETA: f64 = 0.45;
pub const POWER_EXPONENT: f64 = 1.5;
pub const DEFAULT_HORIZON: u32 = 100;

fn elasticities() -> Elasticities {
    Elasticities::new(ALPHA, BETA_START, GAMMA, DELTA_START)
}

/// Reference parameters for `family` at the start of the horizon.
pub fn reference_model(family: Family) -> ModelSpec {
    match family {
        Family::CobbDouglas => ModelSpec::CobbDouglas(CobbDouglasParams {
            scale: PRODUCTIVITY,
            elasticities: elasticities(),
        }),
        Family::Leontief => ModelSpec::Leontief(LeontiefParams {
            coefficients: [1.0; 4],
            shadow_price: 1.0,
        }),
        Family::Ces => ModelSpec::Ces(CesParams {
            scale: PRODUCTIVITY,
            shares: [0.25; 4],
            rho: RHO,
        }),
        Family::Linear => ModelSpec::Linear(LinearParams {
            weights: [1.0, LINEAR_AGI_WEIGHT, 1.0, 1.0],
        }),
        Family::Quadratic => ModelSpec::Quadratic(QuadraticParams {
            constant: PRODUCTIVITY,
            b: 1.0,
            c: QUADRATIC_AGI_COEFFICIENT,
            f: 0.1,
            g: 0.1,
            h: 0.1,
            i: 0.1,
        }),
        Family::Translog => ModelSpec::Translog(TranslogParams {
            log_scale: PRODUCTIVITY.ln(),
            elasticities: elasticities(),
            lambda: [0.01, 0.01, 0.01, 0.01, 0.005, 0.005],
        }),
        Family::VonThunen => ModelSpec::VonThunen(VonThunenParams {
            scale: PRODUCTIVITY,
            elasticities: elasticities(),
            c_decay: VON_THUNEN_HUMAN_DECAY,
            d_decay: VON_THUNEN_AGI_DECAY,
        }),
        Family::Spillover => ModelSpec::Spillover(SpilloverParams {
            scale: PRODUCTIVITY,
            elasticities: elasticities(),
            theta: SPILLOVER_THETA,
        }),
        Family::Power => ModelSpec::Power(PowerParams {
            scale: PRODUCTIVITY,
            p: POWER_EXPONENT,
        }),
        Family::Hybrid => ModelSpec::Hybrid(HybridParams {
            scale: PRODUCTIVITY,
            lambda: HYBRID_HUMAN_WEIGHT,
            mu: HYBRID_HUMAN_WEIGHT,
            rho: RHO,
        }),
    }
}

/// Reference setup for `family`: constant parameters except the AGI
/// elasticities β and δ, which ramp linearly for the four families that
/// carry them.
pub fn reference_setup(family: Family) -> FamilySetup {
    let mut setup = FamilySetup::constant(&reference_model(family));
    if family.param_names().contains(&"beta") {
        setup
            .set_ramp("beta", Ramp::linear(BETA_START, BETA_END))
            .expect("beta is a parameter of this family");
        setup
            .set_ramp("delta", Ramp::linear(DELTA_START, DELTA_END))
            .expect("delta is a parameter of this family");
    }
    setup
}

/// Human labor, human capital, AGI capital and the knowledge stock held at 1;
/// AGI labor grows logistically from 0.1 to 10.
pub fn default_inputs() -> InputPaths {
    InputPaths {
        labor: Ramp::constant(1.0),
        agi_labor: Ramp::logistic(0.1, 10.0),
        capital: Ramp::constant(1.0),
        agi_capital: Ramp::constant(1.0),
        knowledge_stock: Ramp::constant(1.0),
    }
}

/// Baseline plus the individual interventions and their combined stack.
pub fn reference_policies() -> Vec<ScenarioPolicy> {
    let t1 = PolicySpec::full_stack();
    vec![
        ScenarioPolicy::baseline(),
        ScenarioPolicy::new(
            "tax",
            PolicySpec {
                proportional_tax: t1.proportional_tax,
                ..PolicySpec::default()
            },
        ),
        ScenarioPolicy::new(
            "uad",
            PolicySpec {
                uad_rate: t1.uad_rate,
                ..PolicySpec::default()
            },
        ),
        ScenarioPolicy::new(
            "coop",
            PolicySpec {
                coop_share: t1.coop_share,
                ..PolicySpec::default()
            },
        ),
        ScenarioPolicy::new("fixed_levy", PolicySpec::default()).with_levy_share(0.25),
        ScenarioPolicy::new("full_stack", t1),
    ]
}

/// All ten families over the default horizon with every reference policy.
pub fn reference_scenario() -> Scenario {
    Scenario {
        horizon: DEFAULT_HORIZON,
        families: Family::ALL.into_iter().map(reference_setup).collect(),
        inputs: default_inputs(),
        policies: reference_policies(),
    }
}
