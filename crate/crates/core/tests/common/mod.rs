//! Oracles and fixtures shared by the integration tests.
//!
//! The ODE oracle (an adaptive Dormand-Prince 5(4) integrator) and the LP
//! oracle (enumeration of every basic solution of a small bounded problem)
//! use none of the library's numerics.

#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector, Matrix6, Matrix6x3, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rvd_planner::cli_io::{load_scenario, ScenarioConfig};
use rvd_planner::constraints::schedule;
use rvd_planner::dynamics::ControlSequence;
use rvd_planner::lp::LpProblem;
use rvd_planner::transcription::Maneuver;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"))
}

pub fn scenario(name: &str) -> ScenarioConfig {
    load_scenario(scenario_path(name)).expect("bundled scenario loads")
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1` with local error control.
pub fn dopri5<F>(f: F, t0: f64, y0: &[f64], t1: f64, rtol: f64, atol: f64) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let dim = y0.len();
    let span = t1 - t0;
    if span == 0.0 {
        return y0.to_vec();
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = span.abs() / 100.0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        steps += 1;
        assert!(steps < 10_000_000, "step size collapsed");
        h = h.min((t1 - t).abs());
        let mut stage = vec![0.0; dim];
        for s in 0..7 {
            for (i, v) in stage.iter_mut().enumerate() {
                *v = y[i] + dir * h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(t + dir * C[s] * h, &stage);
        }
        let mut err = 0.0f64;
        let mut next = vec![0.0; dim];
        for i in 0..dim {
            next[i] = y[i] + dir * h * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>();
            let low = y[i] + dir * h * (0..7).map(|s| B4[s] * k[s][i]).sum::<f64>();
            let scale = atol + rtol * y[i].abs().max(next[i].abs());
            err = err.max(((next[i] - low) / scale).abs());
        }
        if err <= 1.0 {
            t += dir * h;
            y = next;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    y
}

/// Optimum of a bounded LP or `None` when it has no feasible point.
pub struct VertexOptimum {
    pub objective: f64,
    pub z: Vec<f64>,
}

/// Exhaustive vertex enumeration. Every bound must be finite so that the
/// feasible region, when nonempty, is a polytope with a vertex optimum.
pub fn vertex_enumeration(lp: &LpProblem, tol: f64) -> Option<VertexOptimum> {
    let n = lp.num_vars();
    assert!(
        lp.lb.iter().chain(&lp.ub).all(|b| b.is_finite()),
        "oracle needs finite bounds"
    );
    // candidate active rows: bounds and inequality rows; equalities are always active
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e.clone(), lp.lb[j]));
        rows.push((e, lp.ub[j]));
    }
    for i in 0..lp.b_ub.len() {
        rows.push((lp.a_ub.row(i).iter().copied().collect(), lp.b_ub[i]));
    }
    let m_eq = lp.b_eq.len();
    if m_eq > n {
        return None;
    }
    let free = n - m_eq;
    let mut best: Option<VertexOptimum> = None;
    let mut pick: Vec<usize> = (0..free).collect();
    loop {
        let mut m = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for i in 0..m_eq {
            m.row_mut(i).copy_from(&lp.a_eq.row(i));
            rhs[i] = lp.b_eq[i];
        }
        for (slot, &r) in pick.iter().enumerate() {
            for j in 0..n {
                m[(m_eq + slot, j)] = rows[r].0[j];
            }
            rhs[m_eq + slot] = rows[r].1;
        }
        let svd = m.clone().svd(false, false);
        let smax = svd.singular_values.max();
        if smax > 0.0 && svd.singular_values.min() > 1e-9 * smax {
            if let Some(z) = m.lu().solve(&rhs) {
                let z: Vec<f64> = z.iter().copied().collect();
                if lp.max_violation(&z) <= tol {
                    let obj = lp.objective(&z);
                    if best.as_ref().is_none_or(|b| obj < b.objective) {
                        best = Some(VertexOptimum { objective: obj, z });
                    }
                }
            }
        }
        if !next_combination(&mut pick, rows.len()) {
            break;
        }
    }
    best
}

/// Advances `pick` to the next `k`-subset of `0..len` in lexicographic order.
fn next_combination(pick: &mut [usize], len: usize) -> bool {
    let k = pick.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < len - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Right-hand side of the scaled HCW equations, written out by hand.
pub fn hcw_rhs(x: &[f64], u: &[f64; 3]) -> Vec<f64> {
    vec![
        x[3],
        x[4],
        x[5],
        3.0 * x[0] + 2.0 * x[4] + u[0],
        -2.0 * x[3] + u[1],
        -x[2] + u[2],
    ]
}

/// Zero-order-hold transition and input matrices by integrating unit
/// initial states and unit inputs over one step.
pub fn oracle_hcw_matrices(tau: f64) -> (Matrix6<f64>, Matrix6x3<f64>) {
    let mut a = Matrix6::zeros();
    for i in 0..6 {
        let mut e = vec![0.0; 6];
        e[i] = 1.0;
        let col = dopri5(|_, x| hcw_rhs(x, &[0.0; 3]), 0.0, &e, tau, 1e-13, 1e-15);
        a.column_mut(i).copy_from_slice(&col);
    }
    let mut b = Matrix6x3::zeros();
    for j in 0..3 {
        let mut u = [0.0; 3];
        u[j] = 1.0;
        let col = dopri5(|_, x| hcw_rhs(x, &u), 0.0, &[0.0; 6], tau, 1e-13, 1e-15);
        b.column_mut(j).copy_from_slice(&col);
    }
    (a, b)
}

/// Dense random LP with a finite box. Right-hand sides are built around a
/// random interior point with occasionally negative slack, so a share of
/// the instances is infeasible.
pub fn random_lp(rng: &mut ChaCha8Rng) -> LpProblem {
    let n = rng.gen_range(1..=6);
    let m_ub = rng.gen_range(0..=8);
    let m_eq = rng.gen_range(0..=2.min(n));
    let mut lp = LpProblem::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    lp.lb = (0..n).map(|_| rng.gen_range(-3.0..0.0)).collect();
    lp.ub = lp.lb.iter().map(|l| l + rng.gen_range(0.5..4.0)).collect();
    let z0: Vec<f64> = lp
        .lb
        .iter()
        .zip(&lp.ub)
        .map(|(l, u)| rng.gen_range(*l..*u))
        .collect();
    lp.a_ub = DMatrix::from_fn(m_ub, n, |_, _| rng.gen_range(-1.0..1.0));
    lp.b_ub = (0..m_ub)
        .map(|i| (0..n).map(|j| lp.a_ub[(i, j)] * z0[j]).sum::<f64>() + rng.gen_range(-0.3..1.0))
        .collect();
    lp.a_eq = DMatrix::from_fn(m_eq, n, |_, _| rng.gen_range(-1.0..1.0));
    let shift = if rng.gen_bool(0.1) { 5.0 } else { 0.0 };
    lp.b_eq = (0..m_eq)
        .map(|i| (0..n).map(|j| lp.a_eq[(i, j)] * z0[j]).sum::<f64>() + shift)
        .collect();
    lp
}

/// Largest difference between the condensed LP rows evaluated at `z` and
/// the same constraints evaluated on the step-by-step trajectory.
pub fn condensation_gap(m: &Maneuver, horizon: usize, z: &DVector<f64>) -> f64 {
    let lp = m.build_lp(horizon, 1.0).unwrap();
    let n_u = 3 * horizon;
    let controls = ControlSequence(
        (0..horizon)
            .map(|j| Vector3::from_fn(|d, _| z[3 * j + d] - z[n_u + 3 * j + d]))
            .collect(),
    );
    let states = m.model.propagate(&m.x0, &controls);
    let lhs = &lp.a_ub * z;
    let mut gap: f64 = 0.0;
    let mut row = 0;
    for (i, x) in states.iter().take(horizon).enumerate() {
        let set = schedule(
            m.k0() + i,
            horizon,
            &m.params,
            &m.x0.position(),
            &m.reference,
        );
        for h in &set.rows {
            let direct = h.a.dot(&x.position()) - h.b;
            gap = gap.max((lhs[row] - lp.b_ub[row] - direct).abs());
            row += 1;
        }
    }
    assert_eq!(row, lp.b_ub.len(), "row count");
    let terminal = &lp.a_eq * z;
    let miss = states[horizon].0 - m.reference.at(m.k0() + horizon).0;
    for r in 0..6 {
        gap = gap.max((terminal[r] - lp.b_eq[r] - miss[r]).abs());
    }
    gap
}
