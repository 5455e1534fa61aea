//! Climate-economy model in the DICE-2016 lineage with a non-market
//! consumption good and an abatement-dependent preference weight.
//!
//! The crate is organized bottom-up:
//!
//! - [`calibration`]: parameter set, config parsing, exogenous driver paths;
//! - [`climate`]: three-reservoir carbon cycle, forcing, two-box temperature;
//! - [`economy`]: production, damages, abatement cost, capital accumulation;
//! - [`preference`]: two-good utility, preference weights, relative price
//!   and its growth decomposition, welfare;
//! - [`simulate`]: the forward recursion tying those together;
//! - [`optimizer`]: bounded welfare maximization over abatement and savings;
//! - [`fixed_point`]: alternation between optimization and weight updates;
//! - [`analysis`]: scenarios, social cost of carbon, sweeps, artifacts.

pub mod analysis;
pub mod calibration;
pub mod climate;
pub mod economy;
pub mod error;
pub mod fixed_point;
pub mod optimizer;
pub mod preference;
pub mod simulate;

pub use analysis::{
    net_zero_year, run_scenario, run_sweep, summarize, Scenario, ScenarioResult, ScenarioSummary,
};
pub use calibration::ModelParams;
pub use error::{Error, Result};
pub use fixed_point::{solve_endogenous, FixedPointOpts, FixedPointReport, FixedPointStatus};
pub use optimizer::{optimize, Bounds, GradientMode, OptimizationReport, OptimizeOpts};
pub use preference::WeightPath;
pub use simulate::{simulate, welfare_of, ControlPath, Model, Trajectory};
