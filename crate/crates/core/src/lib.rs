//! Production-function engine for economies where AGI supplies both labor and
//! capital.
//!
//! Ten families of production functions price each factor at its marginal
//! product. On top of that sit the income accounting ([`accounting`]), an
//! independent finite-difference referee ([`oracle`]), redistribution
//! policies ([`policy`]) and time-evolution scenarios ([`scenario`]).

pub mod accounting;
pub mod error;
pub mod models;
pub mod oracle;
pub mod policy;
pub mod presets;
pub mod scenario;
pub mod types;

pub use accounting::{
    normalize_power_shift, power_shift_raw, productivity, read_distribution, total_income,
};
pub use error::{Error, Result};
pub use models::{Family, ModelSpec};
pub use policy::{apply_policy_stack, PolicySpec};
pub use scenario::{run_policy_grid, run_scenario, Ramp, Scenario, TrajectoryPoint};
pub use types::{DistributionReading, Factor, FactorInputs, FactorSnapshot};
