//! Normalized Hill-Clohessy-Wiltshire relative motion.
//!
//! Positions are scaled by `eta^2 / a_max`, velocities by `eta / a_max` and
//! time by `eta`, so that the per-axis control bound becomes `|u| <= 1` and
//! one orbit spans `2*pi` units of scaled time.
//!
//! Stacked input sequences are stored in chronological order,
//! `[u(k0); u(k0+1); ...; u(k0+N-1)]`, and the reachability matrix column
//! blocks are laid out to match: `R_N = [A^(N-1) B, ..., A B, B]`.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix6, Matrix6x3, SMatrix, Vector3, Vector6};

use crate::error::{Error, Result};

/// State dimension.
pub const STATE_DIM: usize = 6;
/// Input dimension.
pub const INPUT_DIM: usize = 3;

/// Relative singular-value cutoff used for the reachability pseudoinverses.
pub const PINV_RCOND: f64 = 1e-12;

/// Physical scales of a maneuver: mean motion, control authority and sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioScales {
    /// Target mean motion, rad/s.
    pub eta: f64,
    /// Maximum per-axis acceleration, m/s^2.
    pub a_max: f64,
    /// Sampling interval in scaled time, rad/sample.
    pub tau_s: f64,
    /// Initial discrete time index.
    pub k0: usize,
    /// Epoch of sample `k0`, s.
    pub t0: f64,
}

impl ScenarioScales {
    pub fn new(eta: f64, a_max: f64, tau_s: f64, k0: usize, t0: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidScales(format!(
                "eta must be positive, got {eta}"
            )));
        }
        if !(a_max.is_finite() && a_max > 0.0) {
            return Err(Error::InvalidScales(format!(
                "a_max must be positive, got {a_max}"
            )));
        }
        if !(tau_s.is_finite() && tau_s > 0.0) {
            return Err(Error::InvalidScales(format!(
                "tau_s must be positive, got {tau_s}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidScales("t0 must be finite".into()));
        }
        Ok(Self {
            eta,
            a_max,
            tau_s,
            k0,
            t0,
        })
    }

    /// Multiplier taking metres to normalized position units.
    pub fn position_scale(&self) -> f64 {
        self.eta * self.eta / self.a_max
    }

    /// Multiplier taking m/s to normalized velocity units.
    pub fn velocity_scale(&self) -> f64 {
        self.eta / self.a_max
    }

    /// Duration of one sample, s.
    pub fn sample_period(&self) -> f64 {
        self.tau_s / self.eta
    }

    /// Physical epoch of discrete index `k`.
    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + (k as f64 - self.k0 as f64) * self.sample_period()
    }

    pub fn normalize(&self, state: &PhysicalRelativeState) -> NormalizedState {
        NormalizedState::from_parts(
            state.p * self.position_scale(),
            state.v * self.velocity_scale(),
        )
    }

    pub fn denormalize(&self, state: &NormalizedState) -> PhysicalRelativeState {
        PhysicalRelativeState {
            p: state.position() / self.position_scale(),
            v: state.velocity() / self.velocity_scale(),
        }
    }
}

/// Relative position (m) and velocity (m/s) in RTN components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalRelativeState {
    pub p: Vector3<f64>,
    pub v: Vector3<f64>,
}

/// Normalized 6-state `[x_p; x_v]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedState(pub Vector6<f64>);

impl NormalizedState {
    pub fn zeros() -> Self {
        Self(Vector6::zeros())
    }

    pub fn from_parts(position: Vector3<f64>, velocity: Vector3<f64>) -> Self {
        let mut x = Vector6::zeros();
        x.fixed_rows_mut::<3>(0).copy_from(&position);
        x.fixed_rows_mut::<3>(3).copy_from(&velocity);
        Self(x)
    }

    pub fn position(&self) -> Vector3<f64> {
        self.0.fixed_rows::<3>(0).into_owned()
    }

    pub fn velocity(&self) -> Vector3<f64> {
        self.0.fixed_rows::<3>(3).into_owned()
    }
}

/// Control sequence `u(k0), ..., u(k0+N-1)`, chronological.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlSequence(pub Vec<Vector3<f64>>);

impl ControlSequence {
    pub fn zeros(horizon: usize) -> Self {
        Self(vec![Vector3::zeros(); horizon])
    }

    pub fn horizon(&self) -> usize {
        self.0.len()
    }

    /// Largest absolute entry over the whole sequence.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|u| u.amax()).fold(0.0, f64::max)
    }

    /// Sum of absolute entries, i.e. the normalized fuel.
    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|u| u.abs().sum()).sum()
    }

    pub fn is_admissible(&self) -> bool {
        self.max_abs() <= 1.0
    }

    pub fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(
            INPUT_DIM * self.horizon(),
            self.0.iter().flat_map(|u| u.iter().copied()),
        )
    }

    /// Inverse of [`ControlSequence::stacked`]; `stacked.len()` must be a multiple of 3.
    pub fn from_stacked(stacked: &DVector<f64>) -> Self {
        assert_eq!(
            stacked.len() % INPUT_DIM,
            0,
            "stacked input length not a multiple of 3"
        );
        Self(
            stacked
                .as_slice()
                .chunks_exact(INPUT_DIM)
                .map(Vector3::from_column_slice)
                .collect(),
        )
    }
}

/// Continuous-time normalized HCW matrices `(A_c, B_c)`.
pub fn hcw_continuous() -> (Matrix6<f64>, Matrix6x3<f64>) {
    #[rustfmt::skip]
    let a_c = Matrix6::new(
        0.0, 0.0,  0.0,  1.0, 0.0, 0.0,
        0.0, 0.0,  0.0,  0.0, 1.0, 0.0,
        0.0, 0.0,  0.0,  0.0, 0.0, 1.0,
        3.0, 0.0,  0.0,  0.0, 2.0, 0.0,
        0.0, 0.0,  0.0, -2.0, 0.0, 0.0,
        0.0, 0.0, -1.0,  0.0, 0.0, 0.0,
    );
    let mut b_c = Matrix6x3::zeros();
    b_c.fixed_view_mut::<3, 3>(3, 0)
        .copy_from(&Matrix3::identity());
    (a_c, b_c)
}

/// Zero-order-hold discrete model `x(k+1) = A x(k) + B u(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    pub a: Matrix6<f64>,
    pub b: Matrix6x3<f64>,
    pub tau_s: f64,
}

impl DiscreteModel {
    /// Exact discretization through the exponential of the augmented matrix
    /// `[[A_c, B_c], [0, 0]] * tau_s`, whose top blocks are `A` and `B`.
    pub fn discretize(tau_s: f64) -> Self {
        assert!(
            tau_s >= 0.0 && tau_s.is_finite(),
            "tau_s must be finite and non-negative"
        );
        let (a_c, b_c) = hcw_continuous();
        let mut aug = SMatrix::<f64, 9, 9>::zeros();
        aug.fixed_view_mut::<6, 6>(0, 0).copy_from(&(a_c * tau_s));
        aug.fixed_view_mut::<6, 3>(0, 6).copy_from(&(b_c * tau_s));
        let e = aug.exp();
        Self {
            a: e.fixed_view::<6, 6>(0, 0).into_owned(),
            b: e.fixed_view::<6, 3>(0, 6).into_owned(),
            tau_s,
        }
    }

    pub fn step(&self, x: &NormalizedState, u: &Vector3<f64>) -> NormalizedState {
        NormalizedState(self.a * x.0 + self.b * u)
    }

    /// States `x(k0), ..., x(k0+N)` under the given inputs.
    pub fn propagate(&self, x0: &NormalizedState, u: &ControlSequence) -> Vec<NormalizedState> {
        let mut states = Vec::with_capacity(u.horizon() + 1);
        let mut x = *x0;
        states.push(x);
        for uk in &u.0 {
            x = self.step(&x, uk);
            states.push(x);
        }
        states
    }
}

/// Precomputed `A^N`, `R_N` and `R_N^+` for `N` up to an upper bound.
#[derive(Debug, Clone)]
pub struct ReachabilityTable {
    powers: Vec<Matrix6<f64>>,
    reach: Vec<DMatrix<f64>>,
    pinv: Vec<DMatrix<f64>>,
    n_ub: usize,
}

impl ReachabilityTable {
    pub fn new(model: &DiscreteModel, n_ub: usize) -> Self {
        let mut powers = Vec::with_capacity(n_ub + 1);
        powers.push(Matrix6::identity());
        for n in 1..=n_ub {
            powers.push(model.a * powers[n - 1]);
        }

        // index 0 is an empty 6x0 placeholder so that reach[N] is R_N
        let mut reach = Vec::with_capacity(n_ub + 1);
        let mut pinv = Vec::with_capacity(n_ub + 1);
        reach.push(DMatrix::zeros(STATE_DIM, 0));
        pinv.push(DMatrix::zeros(0, STATE_DIM));
        for n in 1..=n_ub {
            // R_N = [A R_(N-1), B]
            let prev: &DMatrix<f64> = &reach[n - 1];
            let mut r = DMatrix::zeros(STATE_DIM, INPUT_DIM * n);
            if n > 1 {
                r.columns_mut(0, INPUT_DIM * (n - 1))
                    .copy_from(&(model.a * prev));
            }
            r.columns_mut(INPUT_DIM * (n - 1), INPUT_DIM)
                .copy_from(&model.b);
            pinv.push(pseudo_inverse(&r));
            reach.push(r);
        }
        Self {
            powers,
            reach,
            pinv,
            n_ub,
        }
    }

    pub fn n_ub(&self) -> usize {
        self.n_ub
    }

    /// `A^n`, for `0 <= n <= n_ub`.
    pub fn power(&self, n: usize) -> &Matrix6<f64> {
        &self.powers[n]
    }

    /// `R_n` (6 x 3n), for `1 <= n <= n_ub`.
    pub fn reach(&self, n: usize) -> &DMatrix<f64> {
        assert!(n >= 1, "R_0 is empty");
        &self.reach[n]
    }

    pub fn pinv(&self, n: usize) -> &DMatrix<f64> {
        assert!(n >= 1, "R_0 is empty");
        &self.pinv[n]
    }

    /// Least-squares input sequence `e_N = R_N^+ (xd - A^N x0)` and the
    /// endpoint miss `||A^N x0 + R_N e_N - xd||_inf`.
    pub fn min_energy(
        &self,
        x0: &NormalizedState,
        xd: &NormalizedState,
        horizon: usize,
    ) -> Result<(DVector<f64>, f64)> {
        if horizon == 0 || horizon > self.n_ub {
            return Err(Error::HorizonOutOfRange {
                horizon,
                max: self.n_ub,
            });
        }
        let free = self.powers[horizon] * x0.0;
        let gap = DVector::from_column_slice((xd.0 - free).as_slice());
        let e = &self.pinv[horizon] * &gap;
        let miss = &self.reach[horizon] * &e - gap;
        Ok((e, miss.amax()))
    }
}

/// SVD pseudoinverse with singular values below `PINV_RCOND * sigma_max` dropped.
pub fn pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    svd.pseudo_inverse(PINV_RCOND * sigma_max)
        .expect("U and V were requested")
}
