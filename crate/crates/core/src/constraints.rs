//! Polyhedral safety sets applied to the normalized position `x_p(k)`.
//!
//! During the rendezvous phase the keep-out sphere `||x_p|| >= r` is replaced
//! by a single half-space whose normal sweeps along the great circle from the
//! initial position direction to the docking-point direction at the end of
//! the rendezvous phase. During docking the position must lie in a polyhedral
//! inner approximation of the visibility cone opening outward from the
//! docking point.
//!
//! The docking polytope bounds the two nonzero components of
//! `T (xi - (xi.d) d)` by `tan(alpha)/sqrt(2)` times the along-axis distance;
//! since `||y||_2 <= sqrt(2) ||y||_inf` for vectors with two nonzero entries,
//! every member lies in the quadratic cone.

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};

use crate::error::{Error, Result};
use crate::target_motion::ReferenceTrajectory;

/// Below this norm the geodesic rotation axis is treated as degenerate.
pub const AXIS_EPS: f64 = 1e-9;

/// One row `a . xi <= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfspace {
    pub a: Vector3<f64>,
    pub b: f64,
}

impl Halfspace {
    /// Positive when violated.
    pub fn violation(&self, xi: &Vector3<f64>) -> f64 {
        self.a.dot(xi) - self.b
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HalfspaceSet {
    pub rows: Vec<Halfspace>,
}

impl HalfspaceSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn max_violation(&self, xi: &Vector3<f64>) -> f64 {
        self.rows
            .iter()
            .map(|h| h.violation(xi))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, xi: &Vector3<f64>, tol: f64) -> bool {
        self.rows.iter().all(|h| h.violation(xi) <= tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintScheduleParams {
    /// Keep-out radius, normalized position units.
    pub r: f64,
    /// Docking cone half-angle, rad.
    pub alpha: f64,
    /// Steps reserved for the docking phase at the end of the horizon.
    pub n_d: usize,
}

impl ConstraintScheduleParams {
    pub fn new(r: f64, alpha: f64, n_d: usize) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::scenario("keepout_radius", "must be positive"));
        }
        if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
            return Err(Error::scenario(
                "alpha_deg",
                "must lie strictly between 0 and 90 degrees",
            ));
        }
        if n_d == 0 {
            return Err(Error::scenario("n_d", "must be at least 1"));
        }
        Ok(Self { r, alpha, n_d })
    }

    /// Rendezvous steps `lambda_N = N - N_d` (may be non-positive).
    pub fn rendezvous_steps(&self, horizon: usize) -> i64 {
        horizon as i64 - self.n_d as i64
    }

    pub fn phase(&self, k: usize, k0: usize, horizon: usize) -> Phase {
        let lambda = self.rendezvous_steps(horizon);
        if lambda > 0 && (k as i64) < k0 as i64 + lambda {
            Phase::Rendezvous
        } else {
            Phase::Docking
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Rendezvous,
    Docking,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Rendezvous => "rendezvous",
            Phase::Docking => "docking",
        }
    }
}

/// A unit vector orthogonal to `v`, built from the basis vector along which
/// `v` has its smallest component.
fn orthogonal_unit(v: &Vector3<f64>) -> Vector3<f64> {
    let i = v.iamin();
    let mut e = Vector3::zeros();
    e[i] = 1.0;
    v.cross(&e).normalize()
}

/// Rotating-hyperplane normal at step `k` for a rendezvous phase of
/// `lambda_n` steps starting at `k0`.
///
/// Parallel endpoints give a fixed normal; antiparallel endpoints rotate
/// about a deterministic axis orthogonal to the start direction.
pub fn hyperplane_normal(
    xp0: &Vector3<f64>,
    xpd_end: &Vector3<f64>,
    k: usize,
    k0: usize,
    lambda_n: usize,
) -> Vector3<f64> {
    assert!(lambda_n >= 1, "rendezvous phase needs at least one step");
    assert!(
        k >= k0 && k <= k0 + lambda_n,
        "k outside the rendezvous window"
    );
    let start = xp0.normalize();
    let end = xpd_end.normalize();
    let cos_arc = start.dot(&end).clamp(-1.0, 1.0);
    let axis = start.cross(&end);
    let axis_norm = axis.norm();
    let axis = if axis_norm >= AXIS_EPS {
        axis / axis_norm
    } else if cos_arc > 0.0 {
        return start;
    } else {
        orthogonal_unit(&start)
    };
    let theta = (k - k0) as f64 / lambda_n as f64 * cos_arc.acos();
    let nu = Rotation3::from_axis_angle(&Unit::new_unchecked(axis), theta) * start;
    nu.normalize()
}

/// `{xi : xi . nu >= r}` written as `-nu . xi <= -r`.
pub fn rendezvous_halfspace(nu: &Vector3<f64>, r: f64) -> HalfspaceSet {
    HalfspaceSet {
        rows: vec![Halfspace { a: -nu, b: -r }],
    }
}

/// Rotation taking the unit vector `d` onto `e_1` about the axis `d x e_1`.
pub fn docking_rotation(d: &Vector3<f64>) -> Matrix3<f64> {
    let e1 = Vector3::x();
    let axis = d.cross(&e1);
    let axis_norm = axis.norm();
    if axis_norm < 1e-12 {
        if d.x > 0.0 {
            return Matrix3::identity();
        }
        return *Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::PI).matrix();
    }
    let angle = d.x.clamp(-1.0, 1.0).acos();
    *Rotation3::from_axis_angle(&Unit::new_unchecked(axis / axis_norm), angle).matrix()
}

/// Six-row docking polytope at docking point `xpd` with half-angle `alpha`.
///
/// Rows are `+/- (T P)_i . xi - c d . xi <= -c ||xpd||` for `i = 0, 1, 2`,
/// where `d` is the unit docking direction, `P = I - d d^T`, and
/// `c = tan(alpha)/sqrt(2)`. The `i = 0` pair has `(T P)_0 = d^T P = 0` and
/// reduces to the forward condition `d . xi >= ||xpd||`.
pub fn docking_polytope(xpd: &Vector3<f64>, alpha: f64) -> HalfspaceSet {
    let radius = xpd.norm();
    assert!(radius > 0.0, "docking point at the target centre");
    let d = xpd / radius;
    let t = docking_rotation(&d);
    let proj = Matrix3::identity() - d * d.transpose();
    let tp = t * proj;
    let c = alpha.tan() / 2f64.sqrt();
    let mut rows = Vec::with_capacity(6);
    for i in 0..3 {
        let row: Vector3<f64> = tp.row(i).transpose();
        for sign in [1.0, -1.0] {
            rows.push(Halfspace {
                a: sign * row - c * d,
                b: -c * radius,
            });
        }
    }
    HalfspaceSet { rows }
}

/// Quadratic visibility cone membership, used only for verification.
pub fn cone_contains(xi: &Vector3<f64>, xpd: &Vector3<f64>, alpha: f64, tol: f64) -> bool {
    let d = xpd.normalize();
    let lateral = xi - xi.dot(&d) * d;
    lateral.norm() <= alpha.tan() * (xi - xpd).dot(&d) + tol
}

/// Constraint set for `x_p(k)` when the horizon is `horizon` samples.
pub fn schedule(
    k: usize,
    horizon: usize,
    params: &ConstraintScheduleParams,
    xp0: &Vector3<f64>,
    reference: &ReferenceTrajectory,
) -> HalfspaceSet {
    let k0 = reference.scales().k0;
    debug_assert!(k >= k0 && k < k0 + horizon);
    match params.phase(k, k0, horizon) {
        Phase::Rendezvous => {
            let lambda = params.rendezvous_steps(horizon) as usize;
            let end = reference.at(k0 + lambda).position();
            let nu = hyperplane_normal(xp0, &end, k, k0, lambda);
            rendezvous_halfspace(&nu, params.r)
        }
        Phase::Docking => docking_polytope(&reference.at(k).position(), params.alpha),
    }
}
