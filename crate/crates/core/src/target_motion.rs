//! Docking-point kinematics on the tumbling target.
//!
//! The docking point is fixed in the target body, so relative to the target
//! centre of mass it moves on a sphere: `dp/dt = omega(t) x p`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};

use crate::dynamics::{NormalizedState, ScenarioScales};
use crate::error::{Error, Result};

/// RK4 substeps per spin period.
pub const RK4_STEPS_PER_PERIOD: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinKind {
    /// Angular velocity constant in RTN components.
    ConstantRtnRate,
    /// Spin axis fixed in inertial space; in the rotating RTN frame the
    /// angular velocity precesses about the orbit normal at the mean motion.
    InertiallyFixedAxis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinModel {
    pub kind: SpinKind,
    /// Angular velocity of the target body relative to RTN at `t0`, rad/s.
    pub omega0: Vector3<f64>,
}

impl SpinModel {
    pub fn constant(omega0: Vector3<f64>) -> Self {
        Self {
            kind: SpinKind::ConstantRtnRate,
            omega0,
        }
    }

    pub fn inertially_fixed(omega0: Vector3<f64>) -> Self {
        Self {
            kind: SpinKind::InertiallyFixedAxis,
            omega0,
        }
    }

    /// Angular velocity at time `t`, rad/s.
    pub fn omega_at(&self, t: f64, t0: f64, eta: f64) -> Vector3<f64> {
        match self.kind {
            SpinKind::ConstantRtnRate => self.omega0,
            SpinKind::InertiallyFixedAxis => precession(eta * (t - t0)) * self.omega0,
        }
    }

    /// Spin period `2 pi / ||omega||`, or `None` for a non-rotating target.
    pub fn spin_period(&self) -> Option<f64> {
        let rate = self.omega0.norm();
        (rate > 0.0).then(|| 2.0 * PI / rate)
    }
}

/// `[[c, s, 0], [-s, c, 0], [0, 0, 1]]` for angle `phi`.
fn precession(phi: f64) -> Matrix3<f64> {
    let (s, c) = phi.sin_cos();
    Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rotation of `v` about `axis` by `|axis| * dt`.
fn rotate_by_rate(axis: &Vector3<f64>, dt: f64, v: &Vector3<f64>) -> Vector3<f64> {
    let rate = axis.norm();
    if rate == 0.0 {
        return *v;
    }
    Rotation3::from_axis_angle(&Unit::new_unchecked(axis / rate), rate * dt) * v
}

/// Docking point position (m) and velocity (m/s) relative to the target
/// centre of mass, RTN components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DockingPointState {
    pub p: Vector3<f64>,
    pub v: Vector3<f64>,
}

/// Docking-point state at time `t` from `p0` at `t0`.
///
/// Both spin models have a closed form: the constant-rate case is a fixed
/// axis-angle rotation, and for the inertially fixed axis the substitution
/// `p = P(eta (t - t0)) q` turns the dynamics into the constant-rate problem
/// `dq/dt = (omega0 + eta e_N) x q`.
pub fn propagate_docking_point(
    p0: &Vector3<f64>,
    model: &SpinModel,
    t0: f64,
    t: f64,
    eta: f64,
) -> Result<DockingPointState> {
    if p0.norm() == 0.0 {
        return Err(Error::ZeroDockingPoint);
    }
    let dt = t - t0;
    let p = match model.kind {
        SpinKind::ConstantRtnRate => rotate_by_rate(&model.omega0, dt, p0),
        SpinKind::InertiallyFixedAxis => {
            let body_rate = model.omega0 + Vector3::new(0.0, 0.0, eta);
            precession(eta * dt) * rotate_by_rate(&body_rate, dt, p0)
        }
    };
    let v = model.omega_at(t, t0, eta).cross(&p);
    Ok(DockingPointState { p, v })
}

/// Fixed-step RK4 integration of `dp/dt = omega(t) x p` with a substep no
/// longer than the spin period over [`RK4_STEPS_PER_PERIOD`], followed by
/// renormalization of `||p||` to `||p0||`.
pub fn propagate_docking_point_rk4(
    p0: &Vector3<f64>,
    model: &SpinModel,
    t0: f64,
    t: f64,
    eta: f64,
) -> Result<DockingPointState> {
    let radius = p0.norm();
    if radius == 0.0 {
        return Err(Error::ZeroDockingPoint);
    }
    let span = t - t0;
    let max_step = model
        .spin_period()
        .map_or(f64::INFINITY, |period| period / RK4_STEPS_PER_PERIOD);
    let steps = if span == 0.0 {
        0
    } else {
        (span.abs() / max_step).ceil().max(1.0) as usize
    };

    let f = |time: f64, p: &Vector3<f64>| model.omega_at(time, t0, eta).cross(p);
    let mut p = *p0;
    if steps > 0 {
        let h = span / steps as f64;
        for i in 0..steps {
            let s = t0 + i as f64 * h;
            let k1 = f(s, &p);
            let k2 = f(s + 0.5 * h, &(p + 0.5 * h * k1));
            let k3 = f(s + 0.5 * h, &(p + 0.5 * h * k2));
            let k4 = f(s + h, &(p + h * k3));
            p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        p *= radius / p.norm();
    }
    let v = model.omega_at(t, t0, eta).cross(&p);
    Ok(DockingPointState { p, v })
}

/// Normalized docking-point states `xd(k)` for `k = k0, ..., k0 + n_ub`.
#[derive(Debug, Clone)]
pub struct ReferenceTrajectory {
    samples: Vec<NormalizedState>,
    scales: ScenarioScales,
}

impl ReferenceTrajectory {
    pub fn build(
        p0: &Vector3<f64>,
        model: &SpinModel,
        scales: &ScenarioScales,
        n_ub: usize,
    ) -> Result<Self> {
        assert!(n_ub >= 1, "reference needs at least one step");
        let samples = (0..=n_ub)
            .map(|i| {
                let k = scales.k0 + i;
                let dp =
                    propagate_docking_point(p0, model, scales.t0, scales.time_at(k), scales.eta)?;
                Ok(NormalizedState::from_parts(
                    dp.p * scales.position_scale(),
                    dp.v * scales.velocity_scale(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            samples,
            scales: *scales,
        })
    }

    /// Wrap precomputed samples; `samples[0]` is taken to be `xd(k0)`.
    pub fn from_samples(samples: Vec<NormalizedState>, scales: ScenarioScales) -> Self {
        assert!(!samples.is_empty());
        Self { samples, scales }
    }

    /// `xd(k)` for an absolute index `k`.
    pub fn at(&self, k: usize) -> &NormalizedState {
        &self.samples[k - self.scales.k0]
    }

    /// `xd(k0 + offset)`.
    pub fn at_offset(&self, offset: usize) -> &NormalizedState {
        &self.samples[offset]
    }

    /// Number of steps past `k0` covered.
    pub fn steps_covered(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn samples(&self) -> &[NormalizedState] {
        &self.samples
    }

    pub fn scales(&self) -> &ScenarioScales {
        &self.scales
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ETA: f64 = 0.001045;

    fn envisat_omega() -> Vector3<f64> {
        Vector3::new(0.0003, 0.0252, -0.0145)
    }

    #[test]
    fn omega_at_epoch_and_full_period() {
        let m = SpinModel::inertially_fixed(envisat_omega());
        assert_eq!(m.omega_at(50.0, 50.0, ETA), envisat_omega());
        let full = 50.0 + 2.0 * PI / ETA;
        assert!((m.omega_at(full, 50.0, ETA) - envisat_omega()).amax() < 1e-15);
        let c = SpinModel::constant(Vector3::new(0.0, 0.0, 0.01));
        assert_eq!(c.omega_at(1234.0, 0.0, ETA), Vector3::new(0.0, 0.0, 0.01));
    }

    #[test]
    fn envisat_spin_rate_is_constant() {
        let m = SpinModel::inertially_fixed(envisat_omega());
        let rate0 = m.omega0.norm();
        assert!((rate0 - 0.029).abs() < 5e-4);
        for i in 0..200 {
            let t = i as f64 * 37.0;
            assert!((m.omega_at(t, 0.0, ETA).norm() - rate0).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_turn_about_normal() {
        let m = SpinModel::constant(Vector3::new(0.0, 0.0, 0.01));
        let s = propagate_docking_point(&Vector3::x(), &m, 0.0, (PI / 2.0) / 0.01, 0.001).unwrap();
        assert!((s.p - Vector3::y()).amax() < 1e-9);
        assert!((s.v - Vector3::new(-0.01, 0.0, 0.0)).amax() < 1e-9);
    }

    #[test]
    fn zero_docking_point_rejected() {
        let m = SpinModel::constant(Vector3::z());
        assert!(matches!(
            propagate_docking_point(&Vector3::zeros(), &m, 0.0, 1.0, ETA),
            Err(Error::ZeroDockingPoint)
        ));
        assert!(propagate_docking_point_rk4(&Vector3::zeros(), &m, 0.0, 1.0, ETA).is_err());
    }

    #[test]
    fn closed_form_agrees_with_rk4() {
        let p2 = Vector3::new(-0.1683, 3.5384, 6.6107);
        let m = SpinModel::inertially_fixed(envisat_omega());
        for &t in &[0.0, 11.7, 100.0, 500.0, 1500.0] {
            let exact = propagate_docking_point(&p2, &m, 0.0, t, ETA).unwrap();
            let rk4 = propagate_docking_point_rk4(&p2, &m, 0.0, t, ETA).unwrap();
            // RK4 truncation error grows linearly with the span
            assert!((exact.p - rk4.p).amax() < 1e-8, "t = {t}");
            assert!((exact.v - rk4.v).amax() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn static_target_reference_is_constant() {
        let scales = ScenarioScales::new(0.001, 0.001, 2.0 * PI / 256.0, 3, 10.0).unwrap();
        let p0 = Vector3::new(1.0, 0.0, 0.0);
        let r =
            ReferenceTrajectory::build(&p0, &SpinModel::constant(Vector3::zeros()), &scales, 20)
                .unwrap();
        assert_eq!(r.steps_covered(), 20);
        for k in 3..=23 {
            assert_eq!(r.at(k).position(), p0 * 1e-3);
            assert_eq!(r.at(k).velocity(), Vector3::zeros());
        }
    }
}
