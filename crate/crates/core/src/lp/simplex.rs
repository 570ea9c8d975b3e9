//! Two-phase bounded-variable revised simplex.
//!
//! Internally every row gets a slack (inequality rows, bounds `[0, inf)`)
//! and an artificial column `+/- e_i`. Rows are equilibrated to unit max-abs
//! coefficient. The basis inverse is kept explicitly, updated by rank-one
//! products and recomputed from an LU factorization every
//! `REFACTOR_EVERY` pivots.

use nalgebra::{DMatrix, DVector};

use super::{Feasibility, LpOptions, LpProblem, LpSolution, LpStatus, Pricing};

const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_STEP: f64 = 1e-12;
/// Consecutive degenerate pivots before Dantzig pricing hands over to Bland.
const DEGENERATE_RUN_LIMIT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Simplex {
    m: usize,
    n_struct: usize,
    /// Structural plus slack columns.
    n_real: usize,
    cols: DMatrix<f64>,
    art_sign: Vec<f64>,
    rhs: DVector<f64>,
    row_scale: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    binv: DMatrix<f64>,
    iterations: usize,
    since_refactor: usize,
    max_iter: usize,
    feas_tol: f64,
    opt_tol: f64,
    pricing: Pricing,
}

impl Simplex {
    fn new(problem: &LpProblem, options: &LpOptions) -> Self {
        let n = problem.num_vars();
        let m_ub = problem.b_ub.len();
        let m = problem.num_rows();
        let n_real = n + m_ub;
        let n_total = n_real + m;

        let mut cols = DMatrix::zeros(m, n_real);
        let mut rhs = DVector::zeros(m);
        let mut row_scale = vec![1.0; m];
        for i in 0..m {
            let (row, b) = if i < m_ub {
                (problem.a_ub.row(i), problem.b_ub[i])
            } else {
                (problem.a_eq.row(i - m_ub), problem.b_eq[i - m_ub])
            };
            let amax = row.amax();
            let s = if amax > 0.0 { 1.0 / amax } else { 1.0 };
            row_scale[i] = s;
            for j in 0..n {
                cols[(i, j)] = row[j] * s;
            }
            rhs[i] = b * s;
            if i < m_ub {
                cols[(i, n + i)] = 1.0;
            }
        }

        let mut lo = vec![0.0; n_total];
        let mut hi = vec![f64::INFINITY; n_total];
        lo[..n].copy_from_slice(&problem.lb);
        hi[..n].copy_from_slice(&problem.ub);

        let mut x = vec![0.0; n_total];
        let mut state = vec![VarState::AtLower; n_total];
        for j in 0..n {
            let (l, u) = (lo[j], hi[j]);
            let (value, st) = match (l.is_finite(), u.is_finite()) {
                (true, true) if u.abs() < l.abs() => (u, VarState::AtUpper),
                (true, _) => (l, VarState::AtLower),
                (false, true) => (u, VarState::AtUpper),
                (false, false) => (0.0, VarState::Free),
            };
            x[j] = value;
            state[j] = st;
        }

        let xs = DVector::from_column_slice(&x[..n]);
        let residual = &rhs - cols.columns(0, n) * xs;

        let mut art_sign = vec![1.0; m];
        let mut basis = vec![0; m];
        let mut binv = DMatrix::zeros(m, m);
        for i in 0..m {
            let art = n_real + i;
            let r = residual[i];
            if i < m_ub && r >= 0.0 {
                basis[i] = n + i;
                x[n + i] = r;
                state[n + i] = VarState::Basic;
                binv[(i, i)] = 1.0;
                // unused artificial stays fixed at zero
                hi[art] = 0.0;
            } else {
                art_sign[i] = if r < 0.0 { -1.0 } else { 1.0 };
                basis[i] = art;
                x[art] = r.abs();
                state[art] = VarState::Basic;
                binv[(i, i)] = art_sign[i];
            }
        }

        let max_iter = options.max_iter.unwrap_or(50 * (m + n));
        Self {
            m,
            n_struct: n,
            n_real,
            cols,
            art_sign,
            rhs,
            row_scale,
            lo,
            hi,
            x,
            state,
            basis,
            binv,
            iterations: 0,
            since_refactor: 0,
            max_iter,
            feas_tol: options.feas_tol,
            opt_tol: options.opt_tol,
            pricing: options.pricing,
        }
    }

    fn n_total(&self) -> usize {
        self.n_real + self.m
    }

    /// `B^-1 a_j`.
    fn ftran(&self, j: usize) -> DVector<f64> {
        if j < self.n_real {
            &self.binv * self.cols.column(j)
        } else {
            let i = j - self.n_real;
            self.binv.column(i) * self.art_sign[i]
        }
    }

    fn refactor(&mut self) {
        let mut b = DMatrix::zeros(self.m, self.m);
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n_real {
                b.set_column(i, &self.cols.column(j));
            } else {
                let r = j - self.n_real;
                b[(r, i)] = self.art_sign[r];
            }
        }
        if let Some(inv) = b.lu().try_inverse() {
            self.binv = inv;
        }
        self.since_refactor = 0;
        self.recompute_basic_values();
    }

    fn recompute_basic_values(&mut self) {
        let mut r = self.rhs.clone();
        for j in 0..self.n_total() {
            if self.state[j] == VarState::Basic || self.x[j] == 0.0 {
                continue;
            }
            if j < self.n_real {
                r.axpy(-self.x[j], &self.cols.column(j), 1.0);
            } else {
                let i = j - self.n_real;
                r[i] -= self.art_sign[i] * self.x[j];
            }
        }
        let xb = &self.binv * r;
        for (i, &j) in self.basis.iter().enumerate() {
            self.x[j] = xb[i];
        }
    }

    /// Reduced costs of all columns for the given cost vector.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let cb = DVector::from_iterator(self.m, self.basis.iter().map(|&j| cost[j]));
        let y = self.binv.tr_mul(&cb);
        let real = self.cols.tr_mul(&y);
        let mut d = Vec::with_capacity(self.n_total());
        d.extend((0..self.n_real).map(|j| cost[j] - real[j]));
        d.extend((0..self.m).map(|i| cost[self.n_real + i] - self.art_sign[i] * y[i]));
        d
    }

    /// Entering column and direction (+1 increase, -1 decrease).
    fn price(&self, d: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (j, &dj) in d.iter().enumerate() {
            let dir = match self.state[j] {
                VarState::Basic => continue,
                _ if self.lo[j] == self.hi[j] => continue,
                VarState::AtLower if dj < -self.opt_tol => 1.0,
                VarState::AtUpper if dj > self.opt_tol => -1.0,
                VarState::Free if dj.abs() > self.opt_tol => -dj.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, score)| dj.abs() > score) {
                best = Some((j, dir, dj.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Ratio test. Returns the step length and the leaving row, or `None`
    /// for the row when the entering variable flips to its other bound.
    /// `Err(())` signals an unbounded ray.
    fn ratio_test(
        &self,
        q: usize,
        dir: f64,
        w: &DVector<f64>,
        bland: bool,
    ) -> Result<(f64, Option<usize>), ()> {
        let flip = self.hi[q] - self.lo[q];
        let limit = |i: usize, slack: f64| -> Option<f64> {
            let j = self.basis[i];
            let alpha = dir * w[i];
            if alpha > PIVOT_TOL && self.lo[j].is_finite() {
                Some((self.x[j] - self.lo[j] + slack) / alpha)
            } else if alpha < -PIVOT_TOL && self.hi[j].is_finite() {
                Some((self.hi[j] - self.x[j] + slack) / -alpha)
            } else {
                None
            }
        };

        let leave = if bland {
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if let Some(t) = limit(i, 0.0) {
                    let t = t.max(0.0);
                    match best {
                        None => best = Some((i, t)),
                        Some((bi, bt)) => {
                            if t < bt - DEGENERATE_STEP
                                || (t <= bt + DEGENERATE_STEP && self.basis[i] < self.basis[bi])
                            {
                                best = Some((i, t.min(bt)));
                            }
                        }
                    }
                }
            }
            best
        } else {
            // Harris two-pass: relaxed bound first, then the largest pivot
            // among rows whose exact ratio fits under it.
            let relax = 0.1 * self.feas_tol;
            let theta = (0..self.m)
                .filter_map(|i| limit(i, relax))
                .fold(f64::INFINITY, f64::min);
            let mut best: Option<(usize, f64, f64)> = None;
            if theta.is_finite() {
                for i in 0..self.m {
                    if let Some(t) = limit(i, 0.0) {
                        if t <= theta {
                            let mag = w[i].abs();
                            if best.is_none_or(|(_, _, bm)| mag > bm) {
                                best = Some((i, t.max(0.0), mag));
                            }
                        }
                    }
                }
            }
            best.map(|(i, t, _)| (i, t))
        };

        match leave {
            Some((_, t)) if flip.is_finite() && flip <= t => Ok((flip, None)),
            Some((i, t)) => Ok((t, Some(i))),
            None if flip.is_finite() => Ok((flip, None)),
            None => Err(()),
        }
    }

    fn run_phase(&mut self, cost: &[f64]) -> PhaseOutcome {
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= self.max_iter {
                return PhaseOutcome::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            let bland = match self.pricing {
                Pricing::Bland => true,
                Pricing::DantzigWithBlandFallback => degenerate_run >= DEGENERATE_RUN_LIMIT,
            };
            let d = self.reduced_costs(cost);
            let Some((q, dir)) = self.price(&d, bland) else {
                return PhaseOutcome::Optimal;
            };
            let w = self.ftran(q);
            let Ok((t, leaving)) = self.ratio_test(q, dir, &w, bland) else {
                return PhaseOutcome::Unbounded;
            };

            self.iterations += 1;
            if t <= DEGENERATE_STEP {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            let step = dir * t;
            self.x[q] += step;
            for (i, &j) in self.basis.iter().enumerate() {
                self.x[j] -= step * w[i];
            }

            match leaving {
                None => {
                    if dir > 0.0 {
                        self.x[q] = self.hi[q];
                        self.state[q] = VarState::AtUpper;
                    } else {
                        self.x[q] = self.lo[q];
                        self.state[q] = VarState::AtLower;
                    }
                }
                Some(r) => {
                    let out = self.basis[r];
                    if dir * w[r] > 0.0 {
                        self.x[out] = self.lo[out];
                        self.state[out] = VarState::AtLower;
                    } else {
                        self.x[out] = self.hi[out];
                        self.state[out] = VarState::AtUpper;
                    }
                    self.basis[r] = q;
                    self.state[q] = VarState::Basic;

                    let piv = w[r];
                    let pivot_row = self.binv.row(r).transpose();
                    let mut u = w;
                    u[r] -= 1.0;
                    u /= piv;
                    self.binv.ger(-1.0, &u, &pivot_row, 1.0);
                    self.since_refactor += 1;
                }
            }
        }
    }

    fn phase_one(&mut self) -> Result<(), LpStatus> {
        let n_total = self.n_total();
        let mut cost = vec![0.0; n_total];
        for i in 0..self.m {
            let art = self.n_real + i;
            if self.hi[art] > 0.0 {
                cost[art] = 1.0;
            }
        }
        match self.run_phase(&cost) {
            PhaseOutcome::IterationLimit => return Err(LpStatus::IterationLimit),
            // cannot happen with non-negative artificials; treat as a numerical failure
            PhaseOutcome::Unbounded => return Err(LpStatus::IterationLimit),
            PhaseOutcome::Optimal => {}
        }
        self.refactor();
        let infeasibility: f64 = (0..self.m).map(|i| self.x[self.n_real + i].abs()).sum();
        if infeasibility > self.feas_tol {
            return Err(LpStatus::Infeasible);
        }
        for i in 0..self.m {
            let art = self.n_real + i;
            self.hi[art] = 0.0;
            if self.state[art] != VarState::Basic {
                self.x[art] = 0.0;
                self.state[art] = VarState::AtLower;
            }
        }
        Ok(())
    }

    fn phase_two(&mut self, c: &[f64]) -> PhaseOutcome {
        let mut cost = vec![0.0; self.n_total()];
        cost[..self.n_struct].copy_from_slice(c);
        let outcome = self.run_phase(&cost);
        if matches!(outcome, PhaseOutcome::Optimal) {
            self.refactor();
        }
        outcome
    }

    fn duals(&self, c: &[f64]) -> Vec<f64> {
        let cb = DVector::from_iterator(
            self.m,
            self.basis
                .iter()
                .map(|&j| if j < self.n_struct { c[j] } else { 0.0 }),
        );
        let y = self.binv.tr_mul(&cb);
        y.iter().zip(&self.row_scale).map(|(y, s)| y * s).collect()
    }
}

fn failed(status: LpStatus, iterations: usize) -> LpSolution {
    let objective = match status {
        LpStatus::Unbounded => f64::NEG_INFINITY,
        _ => f64::INFINITY,
    };
    LpSolution {
        status,
        z: Vec::new(),
        objective,
        duals: Vec::new(),
        iterations,
    }
}

/// Solves the problem to optimality or reports why it could not.
///
/// # Panics
/// If the problem fails [`LpProblem::validate`].
pub fn solve(problem: &LpProblem, options: &LpOptions) -> LpSolution {
    if let Err(e) = problem.validate() {
        panic!("malformed LP: {e}");
    }
    let mut s = Simplex::new(problem, options);
    if let Err(status) = s.phase_one() {
        return failed(status, s.iterations);
    }
    match s.phase_two(&problem.c) {
        PhaseOutcome::Optimal => {}
        PhaseOutcome::Unbounded => return failed(LpStatus::Unbounded, s.iterations),
        PhaseOutcome::IterationLimit => return failed(LpStatus::IterationLimit, s.iterations),
    }
    let z: Vec<f64> = s.x[..s.n_struct].to_vec();
    LpSolution {
        status: LpStatus::Optimal,
        objective: problem.objective(&z),
        duals: s.duals(&problem.c),
        z,
        iterations: s.iterations,
    }
}

/// Phase one only. An iteration limit counts as not proven feasible.
pub fn check_feasible(problem: &LpProblem, feas_tol: f64) -> Feasibility {
    if let Err(e) = problem.validate() {
        panic!("malformed LP: {e}");
    }
    let options = LpOptions {
        feas_tol,
        ..LpOptions::default()
    };
    let mut s = Simplex::new(problem, &options);
    match s.phase_one() {
        Ok(()) => Feasibility::Feasible,
        Err(_) => Feasibility::Infeasible,
    }
}
