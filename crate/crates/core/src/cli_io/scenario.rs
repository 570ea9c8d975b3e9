//! Scenario documents.
//!
//! A scenario is a JSON object in SI units:
//!
//! ```json
//! {
//!   "name": "table1",
//!   "eta": 0.001,
//!   "a_max": 0.001,
//!   "tau_s": 0.02454369260617026,
//!   "p0_docking": [1.0, 0.0, 0.0],
//!   "spin": { "model": "constant_rtn", "omega0": [0.0, 0.0, 0.01] },
//!   "p0_rel": [0.0, -100.0, 0.0],
//!   "v0_rel": [0.0, 0.0, 0.0],
//!   "alpha_deg": 20.0,
//!   "keepout_radius": 5.0,
//!   "n_d": 9,
//!   "gamma": 4.0,
//!   "n_ub": 128
//! }
//! ```
//!
//! `k0` and `t0` default to zero. `spin.model` is `constant_rtn` or
//! `inertially_fixed_axis`. An optional `tolerances` object may override
//! `lp_feas_tol`, `lp_opt_tol` and `membership_tol`.

use std::fs;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintScheduleParams;
use crate::dynamics::{DiscreteModel, PhysicalRelativeState, ScenarioScales};
use crate::error::{Error, Result};
use crate::lp::{DEFAULT_FEAS_TOL, DEFAULT_OPT_TOL};
use crate::search::MEMBERSHIP_TOL;
use crate::target_motion::{ReferenceTrajectory, SpinKind, SpinModel};
use crate::transcription::Maneuver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinVariant {
    ConstantRtn,
    InertiallyFixedAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinConfig {
    pub model: SpinVariant,
    /// rad/s, RTN components at `t0`.
    pub omega0: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub lp_feas_tol: f64,
    pub lp_opt_tol: f64,
    pub membership_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            lp_feas_tol: DEFAULT_FEAS_TOL,
            lp_opt_tol: DEFAULT_OPT_TOL,
            membership_tol: MEMBERSHIP_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    /// Mean motion, rad/s.
    pub eta: f64,
    /// Maximum acceleration per axis, m/s^2.
    pub a_max: f64,
    /// Sampling interval in normalized time, rad/sample.
    pub tau_s: f64,
    /// Docking point relative to the target centre of mass at `t0`, m.
    pub p0_docking: [f64; 3],
    pub spin: SpinConfig,
    /// Chaser position relative to the target, m.
    pub p0_rel: [f64; 3],
    /// Chaser velocity relative to the target, m/s.
    pub v0_rel: [f64; 3],
    pub alpha_deg: f64,
    /// m.
    pub keepout_radius: f64,
    /// Docking-phase steps.
    pub n_d: usize,
    pub gamma: f64,
    /// Largest candidate horizon.
    pub n_ub: usize,
    #[serde(default)]
    pub k0: usize,
    /// s.
    #[serde(default)]
    pub t0: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn check_positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::scenario(
            field,
            format!("must be finite and positive, got {v}"),
        ))
    }
}

fn check_finite(field: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::scenario(field, "must be finite"))
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)?;
    let config: ScenarioConfig = serde_json::from_str(&text)?;
    config.validate()?;
    Ok(config)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("eta", self.eta)?;
        check_positive("a_max", self.a_max)?;
        check_positive("tau_s", self.tau_s)?;
        check_positive("keepout_radius", self.keepout_radius)?;
        check_positive("alpha_deg", self.alpha_deg)?;
        check_finite("p0_docking", &self.p0_docking)?;
        check_finite("spin.omega0", &self.spin.omega0)?;
        check_finite("p0_rel", &self.p0_rel)?;
        check_finite("v0_rel", &self.v0_rel)?;
        check_finite("t0", &[self.t0])?;
        if self.alpha_deg >= 90.0 {
            return Err(Error::scenario("alpha_deg", "must be below 90 degrees"));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::scenario("gamma", "must be finite and non-negative"));
        }
        if Vector3::from(self.p0_docking).norm() == 0.0 {
            return Err(Error::scenario("p0_docking", "must be nonzero"));
        }
        if self.n_d == 0 {
            return Err(Error::scenario("n_d", "must be at least 1"));
        }
        if self.n_d >= self.n_ub {
            return Err(Error::scenario(
                "n_d",
                format!("must be below n_ub = {}", self.n_ub),
            ));
        }
        if Vector3::from(self.p0_rel).norm() <= self.keepout_radius {
            return Err(Error::scenario(
                "keepout_radius",
                "initial position lies inside the keep-out zone",
            ));
        }
        check_positive("tolerances.lp_feas_tol", self.tolerances.lp_feas_tol)?;
        check_positive("tolerances.lp_opt_tol", self.tolerances.lp_opt_tol)?;
        check_positive("tolerances.membership_tol", self.tolerances.membership_tol)?;
        Ok(())
    }

    pub fn scales(&self) -> Result<ScenarioScales> {
        ScenarioScales::new(self.eta, self.a_max, self.tau_s, self.k0, self.t0)
    }

    pub fn spin_model(&self) -> SpinModel {
        let kind = match self.spin.model {
            SpinVariant::ConstantRtn => SpinKind::ConstantRtnRate,
            SpinVariant::InertiallyFixedAxis => SpinKind::InertiallyFixedAxis,
        };
        SpinModel {
            kind,
            omega0: Vector3::from(self.spin.omega0),
        }
    }

    /// Constraint parameters in normalized units.
    pub fn schedule_params(&self) -> Result<ConstraintScheduleParams> {
        let scales = self.scales()?;
        ConstraintScheduleParams::new(
            self.keepout_radius * scales.position_scale(),
            self.alpha_deg.to_radians(),
            self.n_d,
        )
    }

    pub fn reference(&self, n_ub: usize) -> Result<ReferenceTrajectory> {
        ReferenceTrajectory::build(
            &Vector3::from(self.p0_docking),
            &self.spin_model(),
            &self.scales()?,
            n_ub,
        )
    }

    /// Normalized problem data, optionally with a different horizon bound.
    pub fn maneuver(&self, n_ub: Option<usize>) -> Result<Maneuver> {
        let n_ub = n_ub.unwrap_or(self.n_ub);
        if n_ub == 0 {
            return Err(Error::scenario("n_ub", "must be at least 1"));
        }
        let scales = self.scales()?;
        let x0 = scales.normalize(&PhysicalRelativeState {
            p: Vector3::from(self.p0_rel),
            v: Vector3::from(self.v0_rel),
        });
        let mut m = Maneuver::new(
            DiscreteModel::discretize(self.tau_s),
            self.reference(n_ub)?,
            self.schedule_params()?,
            x0,
            n_ub,
        )?;
        m.lp_options.feas_tol = self.tolerances.lp_feas_tol;
        m.lp_options.opt_tol = self.tolerances.lp_opt_tol;
        Ok(m)
    }
}
