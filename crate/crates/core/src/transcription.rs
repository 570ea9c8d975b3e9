//! Fixed-horizon transcription.
//!
//! For a fixed horizon `N` the control sequence is split as `u = p - q` with
//! `p, q` in `[0, 1]^(3N)`, so `||u||_inf <= 1` becomes simple bounds and the
//! fuel term `||u||_1` becomes the linear cost `sum(p + q)`. States are
//! eliminated: every position constraint and the terminal condition are
//! written directly in the inputs through powers of `A`.

use nalgebra::{DMatrix, Matrix6x3, Vector3, Vector6};

use crate::constraints::{schedule, ConstraintScheduleParams};
use crate::dynamics::{
    ControlSequence, DiscreteModel, NormalizedState, ReachabilityTable, INPUT_DIM, STATE_DIM,
};
use crate::error::{Error, Result};
use crate::lp::{self, LpOptions, LpProblem, LpStatus};
use crate::target_motion::ReferenceTrajectory;

/// Tolerance used when re-checking a solution by forward propagation.
pub const VERIFY_TOL: f64 = 1e-7;

/// Everything a fixed-horizon solve needs apart from `N` and `gamma`.
#[derive(Debug, Clone)]
pub struct Maneuver {
    pub model: DiscreteModel,
    pub table: ReachabilityTable,
    pub reference: ReferenceTrajectory,
    pub params: ConstraintScheduleParams,
    pub x0: NormalizedState,
    pub lp_options: LpOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedHorizonSolution {
    pub status: SolveStatus,
    pub horizon: usize,
    /// `N + gamma * fuel`, `+inf` when infeasible.
    pub cost: f64,
    /// `||u||_1`, NaN when infeasible.
    pub fuel: f64,
    /// Empty when infeasible.
    pub controls: ControlSequence,
    /// `x(k0), ..., x(k0 + N)`; empty when infeasible.
    pub states: Vec<NormalizedState>,
    pub lp_iterations: usize,
}

impl FixedHorizonSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Worst violations found when replaying a control sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayReport {
    pub max_control: f64,
    pub max_constraint_violation: f64,
    pub terminal_error: f64,
}

impl ReplayReport {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.max_control <= 1.0 + 1e-8
            && self.max_constraint_violation <= tol
            && self.terminal_error <= tol
    }
}

/// `A^m B` for `m = 0..horizon`.
fn input_gains(maneuver: &Maneuver, horizon: usize) -> Vec<Matrix6x3<f64>> {
    (0..horizon)
        .map(|m| maneuver.table.power(m) * maneuver.model.b)
        .collect()
}

fn position_part(x: &Vector6<f64>) -> Vector3<f64> {
    x.fixed_rows::<3>(0).into_owned()
}

impl Maneuver {
    /// Builds the table up to `n_ub`; the reference must cover `k0 + n_ub`.
    pub fn new(
        model: DiscreteModel,
        reference: ReferenceTrajectory,
        params: ConstraintScheduleParams,
        x0: NormalizedState,
        n_ub: usize,
    ) -> Result<Self> {
        if reference.steps_covered() < n_ub {
            return Err(Error::ReferenceTooShort {
                needed: n_ub,
                available: reference.steps_covered(),
            });
        }
        let table = ReachabilityTable::new(&model, n_ub);
        Ok(Self {
            model,
            table,
            reference,
            params,
            x0,
            lp_options: LpOptions::default(),
        })
    }

    pub fn n_ub(&self) -> usize {
        self.table.n_ub()
    }

    pub fn k0(&self) -> usize {
        self.reference.scales().k0
    }

    fn check_horizon(&self, horizon: usize) -> Result<()> {
        if horizon == 0 || horizon > self.table.n_ub() {
            return Err(Error::HorizonOutOfRange {
                horizon,
                max: self.table.n_ub(),
            });
        }
        if horizon > self.reference.steps_covered() {
            return Err(Error::ReferenceTooShort {
                needed: horizon,
                available: self.reference.steps_covered(),
            });
        }
        Ok(())
    }

    /// LP over `z = [p; q]`, `6N` variables in `[0, 1]`.
    ///
    /// Inequality rows hold the scheduled position constraints for
    /// `k0 .. k0 + N - 1` in step order (the `k0` rows have no variable
    /// dependence), equality rows the six terminal-state components. The
    /// objective omits the constant `N`.
    pub fn build_lp(&self, horizon: usize, gamma: f64) -> Result<LpProblem> {
        self.check_horizon(horizon)?;
        let n_u = INPUT_DIM * horizon;
        let k0 = self.k0();
        let xp0 = self.x0.position();
        let gains = input_gains(self, horizon);

        let mut lp = LpProblem::new(vec![gamma; 2 * n_u]);
        lp.ub = vec![1.0; 2 * n_u];

        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for i in 0..horizon {
            let free = position_part(&(self.table.power(i) * self.x0.0));
            let set = schedule(k0 + i, horizon, &self.params, &xp0, &self.reference);
            for h in &set.rows {
                let mut coeffs = vec![0.0; 2 * n_u];
                for j in 0..i {
                    let c = gains[i - 1 - j].fixed_rows::<3>(0).tr_mul(&h.a);
                    for d in 0..INPUT_DIM {
                        coeffs[INPUT_DIM * j + d] = c[d];
                        coeffs[n_u + INPUT_DIM * j + d] = -c[d];
                    }
                }
                rows.push((coeffs, h.b - h.a.dot(&free)));
            }
        }
        lp.a_ub = DMatrix::from_fn(rows.len(), 2 * n_u, |r, c| rows[r].0[c]);
        lp.b_ub = rows.into_iter().map(|(_, b)| b).collect();

        let target = self.reference.at(k0 + horizon).0 - self.table.power(horizon) * self.x0.0;
        let mut a_eq = DMatrix::zeros(STATE_DIM, 2 * n_u);
        for j in 0..horizon {
            let g = &gains[horizon - 1 - j];
            for d in 0..INPUT_DIM {
                for r in 0..STATE_DIM {
                    a_eq[(r, INPUT_DIM * j + d)] = g[(r, d)];
                    a_eq[(r, n_u + INPUT_DIM * j + d)] = -g[(r, d)];
                }
            }
        }
        lp.a_eq = a_eq;
        lp.b_eq = target.iter().copied().collect();
        Ok(lp)
    }

    /// Solves the fixed-horizon problem and re-verifies the result by
    /// forward propagation.
    pub fn solve_fixed_horizon(&self, horizon: usize, gamma: f64) -> Result<FixedHorizonSolution> {
        let problem = self.build_lp(horizon, gamma)?;
        let sol = lp::solve(&problem, &self.lp_options);
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                return Ok(FixedHorizonSolution {
                    status: SolveStatus::Infeasible,
                    horizon,
                    cost: f64::INFINITY,
                    fuel: f64::NAN,
                    controls: ControlSequence(Vec::new()),
                    states: Vec::new(),
                    lp_iterations: sol.iterations,
                })
            }
            status => return Err(Error::LpFault { horizon, status }),
        }

        let n_u = INPUT_DIM * horizon;
        let controls = ControlSequence(
            (0..horizon)
                .map(|j| {
                    Vector3::from_fn(|d, _| {
                        sol.z[INPUT_DIM * j + d] - sol.z[n_u + INPUT_DIM * j + d]
                    })
                })
                .collect(),
        );
        let states = self.model.propagate(&self.x0, &controls);
        let report = self.replay_report(&controls, &states);
        if !report.is_valid(VERIFY_TOL) {
            return Err(Error::VerificationFailed {
                horizon,
                report: format!("{report:?}"),
            });
        }
        let fuel = controls.l1_norm();
        Ok(FixedHorizonSolution {
            status: SolveStatus::Optimal,
            horizon,
            cost: horizon as f64 + gamma * fuel,
            fuel,
            controls,
            states,
            lp_iterations: sol.iterations,
        })
    }

    /// Checks `states` (as produced by propagating `controls` from `x0`)
    /// against the input bound, the scheduled constraints and the terminal
    /// condition.
    pub fn replay_report(
        &self,
        controls: &ControlSequence,
        states: &[NormalizedState],
    ) -> ReplayReport {
        let horizon = controls.horizon();
        let k0 = self.k0();
        let xp0 = self.x0.position();
        let max_constraint_violation = (0..horizon)
            .map(|i| {
                schedule(k0 + i, horizon, &self.params, &xp0, &self.reference)
                    .max_violation(&states[i].position())
            })
            .fold(0.0, f64::max);
        let terminal_error = (states[horizon].0 - self.reference.at(k0 + horizon).0).amax();
        ReplayReport {
            max_control: controls.max_abs(),
            max_constraint_violation,
            terminal_error,
        }
    }

    /// `x(k0 + i)` from the condensed expansion, for cross-checking.
    pub fn condensed_state(&self, controls: &ControlSequence, i: usize) -> NormalizedState {
        let mut x = self.table.power(i) * self.x0.0;
        for (j, u) in controls.0.iter().take(i).enumerate() {
            x += self.table.power(i - 1 - j) * self.model.b * u;
        }
        NormalizedState(x)
    }
}
