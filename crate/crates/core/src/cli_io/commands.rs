//! Commands behind the `rvd` binary. Each writes plain-text CSV into an
//! output directory and returns its results for programmatic use.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::constraints::Phase;
use crate::error::{Error, Result};
use crate::search::{self, PlanResult, PlanStatus, Profile};
use crate::target_motion::propagate_docking_point;
use crate::transcription::{FixedHorizonSolution, Maneuver};

use super::scenario::ScenarioConfig;

pub const PLAN_HEADER: &str =
    "k,t_s,pR_m,pT_m,pN_m,vR_mps,vT_mps,vN_mps,aR_mps2,aT_mps2,aN_mps2,phase";
pub const PROFILE_HEADER: &str = "N,feasible,J,fuel";
pub const COMPARE_HEADER: &str =
    "gamma,N_star,N_hat,N_bs,J_star,J_hat,J_bs,fuel_star,fuel_hat,fuel_bs,\
wall_ms_star,wall_ms_hat,wall_ms_bs,N1,lps_hat,lps_bs";
pub const REFERENCE_HEADER: &str =
    "k,t_s,pR_m,pT_m,pN_m,vR_mps,vT_mps,vN_mps,xR,xT,xN,xvR,xvT,xvN,p_norm_m";

/// Inclusive `start:end:step` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl GammaGrid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

impl FromStr for GammaGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts.as_slice() else {
            return Err(format!("expected start:end:step, got `{s}`"));
        };
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        let grid = GammaGrid {
            start: parse(a)?,
            end: parse(b)?,
            step: parse(step)?,
        };
        if !(grid.start.is_finite() && grid.end.is_finite() && grid.start >= 0.0) {
            return Err("grid bounds must be finite and non-negative".into());
        }
        if !(grid.step > 0.0 && grid.step.is_finite()) || grid.end < grid.start {
            return Err("need step > 0 and end >= start".into());
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub gamma: Option<f64>,
    pub gamma_grid: Option<GammaGrid>,
    pub n_ub: Option<usize>,
    pub out_dir: PathBuf,
}

impl RunOptions {
    fn gamma(&self, config: &ScenarioConfig) -> Result<f64> {
        let g = self.gamma.unwrap_or(config.gamma);
        if g.is_finite() && g >= 0.0 {
            Ok(g)
        } else {
            Err(Error::scenario("gamma", "must be finite and non-negative"))
        }
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        fs::create_dir_all(&self.out_dir)?;
        Ok(BufWriter::new(File::create(self.out_dir.join(name))?))
    }
}

/// Full round-trip precision.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_opt(n: Option<usize>) -> String {
    n.map_or_else(|| "none".into(), |n| n.to_string())
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Physical trajectory of an optimal solution, one row per sample from `k0`
/// to `k0 + N`. The final row carries zero acceleration.
pub fn write_plan_csv<W: Write>(
    out: &mut W,
    config: &ScenarioConfig,
    maneuver: &Maneuver,
    solution: &FixedHorizonSolution,
) -> Result<()> {
    writeln!(out, "{PLAN_HEADER}")?;
    let scales = maneuver.reference.scales();
    let k0 = scales.k0;
    let n = solution.horizon;
    for (i, x) in solution.states.iter().enumerate() {
        let k = k0 + i;
        let phys = scales.denormalize(x);
        let a = solution
            .controls
            .0
            .get(i)
            .map_or([0.0; 3], |u| (u * config.a_max).into());
        let phase = if i < n {
            maneuver.params.phase(k, k0, n)
        } else {
            Phase::Docking
        };
        let mut fields = vec![k.to_string(), fmt_num(scales.time_at(k))];
        fields.extend(
            phys.p
                .iter()
                .chain(phys.v.iter())
                .chain(a.iter())
                .map(|&v| fmt_num(v)),
        );
        fields.push(phase.as_str().into());
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct PlanReport {
    pub result: PlanResult,
    pub wall_ms: f64,
}

impl PlanReport {
    pub fn summary_line(&self) -> String {
        let d = &self.result.diagnostics;
        match &self.result.solution {
            Some(s) => format!(
                "N_hat={} J={} fuel={} lps_solved={} wall_ms={:.3}",
                s.horizon,
                fmt_num(s.cost),
                fmt_num(s.fuel),
                d.lps_solved,
                self.wall_ms
            ),
            None => format!(
                "status=infeasible lps_solved={} wall_ms={:.3}",
                d.lps_solved, self.wall_ms
            ),
        }
    }
}

/// Runs the local search and writes `plan.csv` and `summary.txt`.
pub fn cmd_plan(config: &ScenarioConfig, opts: &RunOptions) -> Result<PlanReport> {
    let gamma = opts.gamma(config)?;
    let maneuver = config.maneuver(opts.n_ub)?;
    let start = Instant::now();
    let set = search::feasible_set(
        &maneuver.table,
        &maneuver.x0,
        &maneuver.reference,
        config.tolerances.membership_tol,
    );
    let result = search::plan_with_set(&maneuver, &set, gamma)?;
    let report = PlanReport {
        result,
        wall_ms: elapsed_ms(start),
    };

    let mut csv = opts.create("plan.csv")?;
    match &report.result.solution {
        Some(s) => write_plan_csv(&mut csv, config, &maneuver, s)?,
        None => writeln!(csv, "{PLAN_HEADER}")?,
    }
    csv.flush()?;

    let d = &report.result.diagnostics;
    let mut summary = opts.create("summary.txt")?;
    writeln!(summary, "{}", report.summary_line())?;
    writeln!(
        summary,
        "status={}",
        match report.result.status {
            PlanStatus::Planned => "planned",
            PlanStatus::Infeasible => "infeasible",
        }
    )?;
    writeln!(summary, "gamma={}", fmt_num(gamma))?;
    writeln!(summary, "N1={}", fmt_opt(d.initial_guess))?;
    writeln!(summary, "N2={}", fmt_opt(d.first_feasible))?;
    writeln!(summary, "F_size={}", d.feasible_set_size)?;
    let log: Vec<String> = d
        .cost_log
        .iter()
        .map(|(n, j)| format!("{n}:{}", fmt_num(*j)))
        .collect();
    writeln!(summary, "cost_log={}", log.join(";"))?;
    summary.flush()?;
    Ok(report)
}

pub fn write_profile_csv<W: Write>(out: &mut W, profile: &Profile) -> Result<()> {
    writeln!(out, "{PROFILE_HEADER}")?;
    for s in &profile.solutions {
        writeln!(
            out,
            "{},{},{},{}",
            s.horizon,
            s.is_optimal(),
            fmt_num(s.cost),
            fmt_num(s.fuel)
        )?;
    }
    Ok(())
}

/// Solves every horizon and writes `profile.csv`.
pub fn cmd_sweep(config: &ScenarioConfig, opts: &RunOptions) -> Result<Profile> {
    let gamma = opts.gamma(config)?;
    let maneuver = config.maneuver(opts.n_ub)?;
    let profile = search::enumerate_all(&maneuver, gamma)?;
    let mut csv = opts.create("profile.csv")?;
    write_profile_csv(&mut csv, &profile)?;
    csv.flush()?;
    Ok(profile)
}

/// One row of the search-strategy comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub gamma: f64,
    pub n_star: Option<usize>,
    pub n_hat: Option<usize>,
    pub n_bs: Option<usize>,
    pub j_star: f64,
    pub j_hat: f64,
    pub j_bs: f64,
    pub fuel_star: f64,
    pub fuel_hat: f64,
    pub fuel_bs: f64,
    pub wall_ms_star: f64,
    pub wall_ms_hat: f64,
    pub wall_ms_bs: f64,
    pub n1: Option<usize>,
    pub lps_hat: usize,
    pub lps_bs: usize,
}

fn cost_and_fuel(s: Option<&FixedHorizonSolution>) -> (Option<usize>, f64, f64) {
    s.map_or((None, f64::INFINITY, f64::NAN), |s| {
        (Some(s.horizon), s.cost, s.fuel)
    })
}

/// Enumeration, local search and ternary baseline for one `gamma`.
pub fn compare_one(maneuver: &Maneuver, gamma: f64, membership_tol: f64) -> Result<CompareRow> {
    let start = Instant::now();
    let profile = search::enumerate_all(maneuver, gamma)?;
    let wall_ms_star = elapsed_ms(start);

    let start = Instant::now();
    let set = search::feasible_set(
        &maneuver.table,
        &maneuver.x0,
        &maneuver.reference,
        membership_tol,
    );
    let plan = search::plan_with_set(maneuver, &set, gamma)?;
    let wall_ms_hat = elapsed_ms(start);

    let start = Instant::now();
    let baseline = search::binary_search_baseline(maneuver, gamma)?;
    let wall_ms_bs = elapsed_ms(start);

    let (n_star, j_star, fuel_star) = cost_and_fuel(profile.best_solution());
    let (n_hat, j_hat, fuel_hat) = cost_and_fuel(plan.solution.as_ref());
    let (n_bs, j_bs, fuel_bs) = cost_and_fuel(baseline.solution.as_ref());
    Ok(CompareRow {
        gamma,
        n_star,
        n_hat,
        n_bs,
        j_star,
        j_hat,
        j_bs,
        fuel_star,
        fuel_hat,
        fuel_bs,
        wall_ms_star,
        wall_ms_hat,
        wall_ms_bs,
        n1: plan.diagnostics.initial_guess,
        lps_hat: plan.diagnostics.lps_solved,
        lps_bs: baseline.lps_solved,
    })
}

pub fn write_compare_csv<W: Write>(out: &mut W, rows: &[CompareRow]) -> Result<()> {
    writeln!(out, "{COMPARE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{:.3},{:.3},{:.3},{},{},{}",
            fmt_num(r.gamma),
            fmt_opt(r.n_star),
            fmt_opt(r.n_hat),
            fmt_opt(r.n_bs),
            fmt_num(r.j_star),
            fmt_num(r.j_hat),
            fmt_num(r.j_bs),
            fmt_num(r.fuel_star),
            fmt_num(r.fuel_hat),
            fmt_num(r.fuel_bs),
            r.wall_ms_star,
            r.wall_ms_hat,
            r.wall_ms_bs,
            fmt_opt(r.n1),
            r.lps_hat,
            r.lps_bs
        )?;
    }
    Ok(())
}

/// Runs [`compare_one`] over the grid (or the single configured `gamma`)
/// and writes `compare.csv`.
pub fn cmd_compare(config: &ScenarioConfig, opts: &RunOptions) -> Result<Vec<CompareRow>> {
    let gammas = match opts.gamma_grid {
        Some(grid) => grid.values(),
        None => vec![opts.gamma(config)?],
    };
    let maneuver = config.maneuver(opts.n_ub)?;
    let rows = gammas
        .iter()
        .map(|&g| compare_one(&maneuver, g, config.tolerances.membership_tol))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = opts.create("compare.csv")?;
    write_compare_csv(&mut csv, &rows)?;
    csv.flush()?;
    Ok(rows)
}

/// Docking-point track for `k0 ..= k0 + n_ub`: physical state, normalized
/// state and `||p||`.
pub fn write_reference_csv<W: Write>(
    out: &mut W,
    config: &ScenarioConfig,
    n_ub: usize,
) -> Result<()> {
    writeln!(out, "{REFERENCE_HEADER}")?;
    let scales = config.scales()?;
    let model = config.spin_model();
    let p0 = nalgebra::Vector3::from(config.p0_docking);
    let reference = config.reference(n_ub)?;
    for (i, x) in reference.samples().iter().enumerate() {
        let k = scales.k0 + i;
        let t = scales.time_at(k);
        let d = propagate_docking_point(&p0, &model, scales.t0, t, scales.eta)?;
        let mut fields = vec![k.to_string(), fmt_num(t)];
        fields.extend(
            d.p.iter()
                .chain(d.v.iter())
                .chain(x.0.iter())
                .map(|&v| fmt_num(v)),
        );
        fields.push(fmt_num(d.p.norm()));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Writes `reference.csv`.
pub fn cmd_propagate(config: &ScenarioConfig, opts: &RunOptions) -> Result<PathBuf> {
    let n_ub = opts.n_ub.unwrap_or(config.n_ub);
    if n_ub == 0 {
        return Err(Error::scenario("n_ub", "must be at least 1"));
    }
    let mut csv = opts.create("reference.csv")?;
    write_reference_csv(&mut csv, config, n_ub)?;
    csv.flush()?;
    Ok(opts.out_dir.join("reference.csv"))
}

/// Writes the fixed-horizon LP at `horizon` in the plain-text dump format.
pub fn dump_lp(maneuver: &Maneuver, horizon: usize, gamma: f64, path: &Path) -> Result<()> {
    let problem = maneuver.build_lp(horizon, gamma)?;
    let mut out = BufWriter::new(File::create(path)?);
    problem.write_text(&mut out)?;
    out.flush()?;
    Ok(())
}
