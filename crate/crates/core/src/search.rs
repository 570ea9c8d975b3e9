//! Variable-horizon search.
//!
//! Candidate horizons are first pruned with the minimum-energy test (a
//! transfer needing more than unit RMS input per axis cannot satisfy the
//! input bound), then a local search over the surviving set solves a few
//! fixed-horizon LPs. Full enumeration and a ternary-search baseline are
//! provided for comparison.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::dynamics::{NormalizedState, ReachabilityTable, INPUT_DIM};
use crate::error::Result;
use crate::target_motion::ReferenceTrajectory;
use crate::transcription::{FixedHorizonSolution, Maneuver};

/// Endpoint residual (inf-norm) accepted as an exact minimum-energy transfer.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// Ascending set of candidate horizons.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HorizonSet {
    members: Vec<usize>,
}

impl HorizonSet {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `q`-th smallest member (0-based).
    pub fn get(&self, q: usize) -> Option<usize> {
        self.members.get(q).copied()
    }

    /// Position of `n` in ascending order.
    pub fn index_of(&self, n: usize) -> Option<usize> {
        self.members.binary_search(&n).ok()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.index_of(n).is_some()
    }
}

/// Minimum-energy transfer for one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct MinEnergyTransfer {
    pub horizon: usize,
    /// Stacked inputs, chronological.
    pub inputs: DVector<f64>,
    /// `||xd(k0 + N) - A^N x0 - R_N e_N||_inf`.
    pub residual: f64,
    pub l1: f64,
    pub l2: f64,
}

impl MinEnergyTransfer {
    /// Exact endpoint match and `||e_N||_2 <= sqrt(3N)`.
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol && self.l2 <= ((INPUT_DIM * self.horizon) as f64).sqrt()
    }
}

/// Pruned horizon set together with the minimum-energy data for every
/// `N` in `1..=n_ub`.
#[derive(Debug, Clone)]
pub struct FeasibleSet {
    pub horizons: HorizonSet,
    transfers: Vec<MinEnergyTransfer>,
}

impl FeasibleSet {
    /// Minimum-energy data for horizon `n` (`1 <= n <= n_ub`).
    pub fn transfer(&self, n: usize) -> &MinEnergyTransfer {
        &self.transfers[n - 1]
    }

    pub fn transfers(&self) -> &[MinEnergyTransfer] {
        &self.transfers
    }
}

/// Horizons in `1..=table.n_ub()` that pass the minimum-energy test.
///
/// # Panics
/// If the reference does not cover `k0 + n_ub`.
pub fn feasible_set(
    table: &ReachabilityTable,
    x0: &NormalizedState,
    reference: &ReferenceTrajectory,
    tol: f64,
) -> FeasibleSet {
    let n_ub = table.n_ub();
    assert!(
        reference.steps_covered() >= n_ub,
        "reference shorter than the horizon bound"
    );
    let transfers: Vec<MinEnergyTransfer> = (1..=n_ub)
        .map(|n| {
            let (inputs, residual) = table
                .min_energy(x0, reference.at_offset(n), n)
                .expect("horizon within table range");
            let l1 = inputs.lp_norm(1);
            let l2 = inputs.norm();
            MinEnergyTransfer {
                horizon: n,
                inputs,
                residual,
                l1,
                l2,
            }
        })
        .collect();
    let horizons = HorizonSet::new(
        transfers
            .iter()
            .filter(|t| t.passes(tol))
            .map(|t| t.horizon)
            .collect(),
    );
    FeasibleSet {
        horizons,
        transfers,
    }
}

/// `argmin N + gamma ||e_N||_1` over the pruned set, smallest `N` on ties.
pub fn initial_guess(set: &FeasibleSet, gamma: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &n in set.horizons.members() {
        let score = n as f64 + gamma * set.transfer(n).l1;
        if best.is_none_or(|(_, s)| score < s) {
            best = Some((n, score));
        }
    }
    best.map(|(n, _)| n)
}

/// Memoizing wrapper around a per-horizon optimal-cost evaluation
/// (`+inf` for infeasible horizons).
pub struct CostCache<F> {
    eval: F,
    costs: BTreeMap<usize, f64>,
    log: Vec<(usize, f64)>,
}

impl<F: FnMut(usize) -> Result<f64>> CostCache<F> {
    pub fn new(eval: F) -> Self {
        Self {
            eval,
            costs: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    pub fn cost(&mut self, n: usize) -> Result<f64> {
        if let Some(&c) = self.costs.get(&n) {
            return Ok(c);
        }
        let c = (self.eval)(n)?;
        self.costs.insert(n, c);
        self.log.push((n, c));
        Ok(c)
    }

    /// Distinct horizons evaluated so far.
    pub fn evaluations(&self) -> usize {
        self.log.len()
    }

    /// `(N, J*_N)` in evaluation order.
    pub fn log(&self) -> &[(usize, f64)] {
        &self.log
    }
}

/// Probes the set outward from `n1` (both sides at each radius) until an
/// LP-feasible horizon appears. If both sides are feasible at the same
/// radius the cheaper wins, the smaller horizon on ties.
///
/// Returns `None` when every member is infeasible.
pub fn expanding_ring_feasibility<F>(
    set: &HorizonSet,
    n1: usize,
    cache: &mut CostCache<F>,
) -> Result<Option<usize>>
where
    F: FnMut(usize) -> Result<f64>,
{
    let q1 = set
        .index_of(n1)
        .expect("initial guess must belong to the set");
    for i in 0.. {
        let up = set.get(q1 + i);
        let down = q1.checked_sub(i).and_then(|q| set.get(q));
        if up.is_none() && down.is_none() {
            return Ok(None);
        }
        let up = match up {
            Some(n) => Some((n, cache.cost(n)?)),
            None => None,
        };
        let down = match down {
            Some(n) if i > 0 => Some((n, cache.cost(n)?)),
            _ => None,
        };
        let found = match (
            up.filter(|u| u.1.is_finite()),
            down.filter(|d| d.1.is_finite()),
        ) {
            (Some(u), Some(d)) => Some(if u.1 < d.1 { u.0 } else { d.0 }),
            (Some(u), None) => Some(u.0),
            (None, Some(d)) => Some(d.0),
            (None, None) => None,
        };
        if found.is_some() {
            return Ok(found);
        }
    }
    unreachable!()
}

/// Walks the set from `n2` away from `n1` while the cost does not increase
/// and returns the last horizon before the first increase. When `n2 == n1`
/// the direction is that of the cheapest of `n1` and its two neighbours
/// (lower neighbour first on ties); if `n1` itself is cheapest it is
/// returned directly.
pub fn monotone_descent<F>(
    set: &HorizonSet,
    n1: usize,
    n2: usize,
    cache: &mut CostCache<F>,
) -> Result<usize>
where
    F: FnMut(usize) -> Result<f64>,
{
    let q1 = set
        .index_of(n1)
        .expect("initial guess must belong to the set");
    let q2 = set
        .index_of(n2)
        .expect("first feasible horizon must belong to the set");

    let upward = if n2 > n1 {
        true
    } else if n2 < n1 {
        false
    } else {
        let below = match q1.checked_sub(1).and_then(|q| set.get(q)) {
            Some(n) => cache.cost(n)?,
            None => f64::INFINITY,
        };
        let here = cache.cost(n1)?;
        let above = match set.get(q1 + 1) {
            Some(n) => cache.cost(n)?,
            None => f64::INFINITY,
        };
        let lowest = below.min(here).min(above);
        if below == lowest && below.is_finite() {
            false
        } else if above == lowest && here != lowest {
            true
        } else {
            return Ok(n1);
        }
    };

    let mut q = q2;
    let mut current = cache.cost(n2)?;
    loop {
        let next = if upward {
            q + 1
        } else {
            match q.checked_sub(1) {
                Some(p) => p,
                None => break,
            }
        };
        let Some(n) = set.get(next) else { break };
        let c = cache.cost(n)?;
        if c > current {
            break;
        }
        q = next;
        current = c;
    }
    Ok(set.get(q).expect("index stays inside the set"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStatus {
    Planned,
    Infeasible,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchDiagnostics {
    pub initial_guess: Option<usize>,
    pub first_feasible: Option<usize>,
    pub lps_solved: usize,
    pub feasible_set_size: usize,
    /// `(N, J*_N)` in evaluation order.
    pub cost_log: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub status: PlanStatus,
    /// Optimal solution at the selected horizon when planned.
    pub solution: Option<FixedHorizonSolution>,
    pub diagnostics: SearchDiagnostics,
}

impl PlanResult {
    pub fn horizon(&self) -> Option<usize> {
        self.solution.as_ref().map(|s| s.horizon)
    }
}

/// Pruning, initial guess, ring search and descent.
pub fn plan(maneuver: &Maneuver, gamma: f64) -> Result<PlanResult> {
    let set = feasible_set(
        &maneuver.table,
        &maneuver.x0,
        &maneuver.reference,
        MEMBERSHIP_TOL,
    );
    plan_with_set(maneuver, &set, gamma)
}

/// As [`plan`] with a precomputed pruned set (it does not depend on `gamma`).
pub fn plan_with_set(maneuver: &Maneuver, set: &FeasibleSet, gamma: f64) -> Result<PlanResult> {
    let mut diagnostics = SearchDiagnostics {
        feasible_set_size: set.horizons.len(),
        ..SearchDiagnostics::default()
    };
    let Some(n1) = initial_guess(set, gamma) else {
        return Ok(PlanResult {
            status: PlanStatus::Infeasible,
            solution: None,
            diagnostics,
        });
    };
    diagnostics.initial_guess = Some(n1);

    let mut solutions: BTreeMap<usize, FixedHorizonSolution> = BTreeMap::new();
    let mut cache = CostCache::new(|n| {
        let s = maneuver.solve_fixed_horizon(n, gamma)?;
        let cost = s.cost;
        solutions.insert(n, s);
        Ok(cost)
    });

    let n2 = expanding_ring_feasibility(&set.horizons, n1, &mut cache)?;
    let n_hat = match n2 {
        Some(n2) => Some(monotone_descent(&set.horizons, n1, n2, &mut cache)?),
        None => None,
    };
    diagnostics.first_feasible = n2;
    diagnostics.lps_solved = cache.evaluations();
    diagnostics.cost_log = cache.log().to_vec();
    drop(cache);

    Ok(match n_hat {
        Some(n) => PlanResult {
            status: PlanStatus::Planned,
            solution: solutions.remove(&n),
            diagnostics,
        },
        None => PlanResult {
            status: PlanStatus::Infeasible,
            solution: None,
            diagnostics,
        },
    })
}

/// Optimal cost for every horizon and the global minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    /// Index `N - 1` holds the solution for horizon `N`.
    pub solutions: Vec<FixedHorizonSolution>,
    /// Global minimizer, smallest `N` on ties; `None` if nothing is feasible.
    pub best: Option<usize>,
}

impl Profile {
    pub fn cost(&self, n: usize) -> f64 {
        self.solutions[n - 1].cost
    }

    pub fn best_solution(&self) -> Option<&FixedHorizonSolution> {
        self.best.map(|n| &self.solutions[n - 1])
    }
}

/// Solves every horizon in `1..=n_ub` in parallel on the current rayon pool.
pub fn enumerate_all(maneuver: &Maneuver, gamma: f64) -> Result<Profile> {
    let solutions = (1..=maneuver.n_ub())
        .into_par_iter()
        .map(|n| maneuver.solve_fixed_horizon(n, gamma))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(usize, f64)> = None;
    for s in solutions.iter().filter(|s| s.is_optimal()) {
        if best.is_none_or(|(_, c)| s.cost < c) {
            best = Some((s.horizon, s.cost));
        }
    }
    Ok(Profile {
        solutions,
        best: best.map(|(n, _)| n),
    })
}

/// Integer ternary search over `lo..=hi` treating infeasible as `+inf`.
///
/// While more than three candidates remain, two interior points split the
/// interval in thirds and the worse third is discarded (the left one on
/// ties); the best of the last candidates is returned, smallest `N` on
/// ties. `None` if every remaining candidate is infeasible.
pub fn ternary_search<F>(lo: usize, hi: usize, cache: &mut CostCache<F>) -> Result<Option<usize>>
where
    F: FnMut(usize) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo + 1 > 3 {
        let third = (hi - lo) / 3;
        let m1 = lo + third;
        let m2 = hi - third;
        if cache.cost(m1)? < cache.cost(m2)? {
            hi = m2 - 1;
        } else {
            lo = m1 + 1;
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for n in lo..=hi {
        let c = cache.cost(n)?;
        if c.is_finite() && best.is_none_or(|(_, b)| c < b) {
            best = Some((n, c));
        }
    }
    Ok(best.map(|(n, _)| n))
}

/// Baseline result: selected horizon (if any), its solution, LPs solved.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub solution: Option<FixedHorizonSolution>,
    pub lps_solved: usize,
}

/// Ternary search over `1..=n_ub` with one LP per probed horizon.
pub fn binary_search_baseline(maneuver: &Maneuver, gamma: f64) -> Result<BaselineResult> {
    let mut solutions: BTreeMap<usize, FixedHorizonSolution> = BTreeMap::new();
    let mut cache = CostCache::new(|n| {
        let s = maneuver.solve_fixed_horizon(n, gamma)?;
        let cost = s.cost;
        solutions.insert(n, s);
        Ok(cost)
    });
    let best = ternary_search(1, maneuver.n_ub(), &mut cache)?;
    let lps_solved = cache.evaluations();
    drop(cache);
    Ok(BaselineResult {
        solution: best.and_then(|n| solutions.remove(&n)),
        lps_solved,
    })
}
