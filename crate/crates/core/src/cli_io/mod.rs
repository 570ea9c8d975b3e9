//! Scenario files and the command layer.

pub mod commands;
pub mod scenario;

pub use commands::{
    cmd_compare, cmd_plan, cmd_propagate, cmd_sweep, CompareRow, GammaGrid, PlanReport, RunOptions,
};
pub use scenario::{load_scenario, ScenarioConfig, SpinConfig, SpinVariant, Tolerances};
