//! Dense linear programming.
//!
//! Problems are stated as
//!
//! ```text
//! minimize    c^T z
//! subject to  A_ub z <= b_ub
//!             A_eq z  = b_eq
//!             lb <= z <= ub        (infinite bounds allowed)
//! ```
//!
//! and solved by a two-phase bounded-variable revised simplex method.

mod simplex;

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use nalgebra::DMatrix;

pub use simplex::{check_feasible, solve};

pub const DEFAULT_FEAS_TOL: f64 = 1e-8;
pub const DEFAULT_OPT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub c: Vec<f64>,
    pub a_ub: DMatrix<f64>,
    pub b_ub: Vec<f64>,
    pub a_eq: DMatrix<f64>,
    pub b_eq: Vec<f64>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
}

impl LpProblem {
    /// Problem over `n` variables with no rows and default bounds `z >= 0`.
    pub fn new(c: Vec<f64>) -> Self {
        let n = c.len();
        Self {
            c,
            a_ub: DMatrix::zeros(0, n),
            b_ub: Vec::new(),
            a_eq: DMatrix::zeros(0, n),
            b_eq: Vec::new(),
            lb: vec![0.0; n],
            ub: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b_ub.len() + self.b_eq.len()
    }

    /// Checks dimensions and rejects NaN entries.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.num_vars();
        if self.a_ub.ncols() != n || self.a_eq.ncols() != n {
            return Err("constraint matrix width differs from cost length".into());
        }
        if self.a_ub.nrows() != self.b_ub.len() || self.a_eq.nrows() != self.b_eq.len() {
            return Err("constraint matrix height differs from right-hand side".into());
        }
        if self.lb.len() != n || self.ub.len() != n {
            return Err("bound vectors differ from cost length".into());
        }
        let any_nan = self
            .c
            .iter()
            .chain(self.a_ub.iter())
            .chain(&self.b_ub)
            .chain(self.a_eq.iter())
            .chain(&self.b_eq)
            .chain(&self.lb)
            .chain(&self.ub)
            .any(|v| v.is_nan());
        if any_nan {
            return Err("NaN entry".into());
        }
        if self.lb.iter().zip(&self.ub).any(|(l, u)| l > u) {
            return Err("lower bound above upper bound".into());
        }
        Ok(())
    }

    pub fn objective(&self, z: &[f64]) -> f64 {
        self.c.iter().zip(z).map(|(c, z)| c * z).sum()
    }

    /// Largest violation of any row or bound at `z`.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let zv = nalgebra::DVector::from_column_slice(z);
        let ub_rows = &self.a_ub * &zv;
        let eq_rows = &self.a_eq * &zv;
        let mut worst = 0.0f64;
        for (lhs, b) in ub_rows.iter().zip(&self.b_ub) {
            worst = worst.max(lhs - b);
        }
        for (lhs, b) in eq_rows.iter().zip(&self.b_eq) {
            worst = worst.max((lhs - b).abs());
        }
        for ((z, l), u) in z.iter().zip(&self.lb).zip(&self.ub) {
            worst = worst.max(l - z).max(z - u);
        }
        worst
    }

    /// Plain-text dump: a `dims` line then one section per block, one matrix
    /// row per line, values in shortest round-trip decimal form.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# lp-problem v1")?;
        writeln!(
            out,
            "dims {} {} {}",
            self.num_vars(),
            self.b_ub.len(),
            self.b_eq.len()
        )?;
        write_section(&mut out, "c", std::slice::from_ref(&self.c))?;
        write_section(&mut out, "a_ub", &matrix_rows(&self.a_ub))?;
        write_section(&mut out, "b_ub", std::slice::from_ref(&self.b_ub))?;
        write_section(&mut out, "a_eq", &matrix_rows(&self.a_eq))?;
        write_section(&mut out, "b_eq", std::slice::from_ref(&self.b_eq))?;
        write_section(&mut out, "lb", std::slice::from_ref(&self.lb))?;
        write_section(&mut out, "ub", std::slice::from_ref(&self.ub))?;
        Ok(())
    }

    /// Parses the format produced by [`LpProblem::write_text`].
    pub fn read_text<R: BufRead>(input: R) -> io::Result<Self> {
        let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        let mut dims: Option<(usize, usize, usize)> = None;
        let mut sections: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("dims") {
                let v: Vec<usize> = rest
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| bad(format!("bad dims `{line}`"))))
                    .collect::<io::Result<_>>()?;
                let [n, m_ub, m_eq] = v[..] else {
                    return Err(bad("dims needs three integers".into()));
                };
                dims = Some((n, m_ub, m_eq));
            } else if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                sections.push((name.to_string(), Vec::new()));
            } else {
                let row = line
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| bad(format!("bad number `{t}`"))))
                    .collect::<io::Result<Vec<f64>>>()?;
                sections
                    .last_mut()
                    .ok_or_else(|| bad("data before first section".into()))?
                    .1
                    .push(row);
            }
        }
        let (n, m_ub, m_eq) = dims.ok_or_else(|| bad("missing dims line".into()))?;
        let mut take = |name: &str| -> io::Result<Vec<Vec<f64>>> {
            let i = sections
                .iter()
                .position(|(s, _)| s == name)
                .ok_or_else(|| bad(format!("missing section [{name}]")))?;
            Ok(sections.swap_remove(i).1)
        };
        let vector = |rows: Vec<Vec<f64>>, len: usize, name: &str| -> io::Result<Vec<f64>> {
            let v: Vec<f64> = rows.into_iter().flatten().collect();
            if v.len() != len {
                return Err(bad(format!(
                    "[{name}] has {} entries, expected {len}",
                    v.len()
                )));
            }
            Ok(v)
        };
        let matrix = |rows: Vec<Vec<f64>>, height: usize, name: &str| -> io::Result<DMatrix<f64>> {
            if rows.len() != height || rows.iter().any(|r| r.len() != n) {
                return Err(bad(format!("[{name}] is not {height} x {n}")));
            }
            Ok(DMatrix::from_row_iterator(
                height,
                n,
                rows.into_iter().flatten(),
            ))
        };
        let problem = LpProblem {
            c: vector(take("c")?, n, "c")?,
            a_ub: matrix(take("a_ub")?, m_ub, "a_ub")?,
            b_ub: vector(take("b_ub")?, m_ub, "b_ub")?,
            a_eq: matrix(take("a_eq")?, m_eq, "a_eq")?,
            b_eq: vector(take("b_eq")?, m_eq, "b_eq")?,
            lb: vector(take("lb")?, n, "lb")?,
            ub: vector(take("ub")?, n, "ub")?,
        };
        problem.validate().map_err(bad)?;
        Ok(problem)
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn write_section<W: Write>(out: &mut W, name: &str, rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "[{name}]")?;
    for row in rows.iter().filter(|r| !r.is_empty()) {
        let mut line = String::new();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            write!(line, "{v:?}").unwrap();
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
}

/// Entering-variable selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    /// Smallest eligible index enters, smallest index leaves on ties.
    Bland,
    /// Most negative reduced cost enters; falls back to Bland's rule after a
    /// run of degenerate pivots so that cycling cannot occur.
    DantzigWithBlandFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// Pivot limit; `None` means `50 * (rows + cols)`.
    pub max_iter: Option<usize>,
    pub pricing: Pricing,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            feas_tol: DEFAULT_FEAS_TOL,
            opt_tol: DEFAULT_OPT_TOL,
            max_iter: None,
            pricing: Pricing::DantzigWithBlandFallback,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; empty unless `status` is `Optimal`.
    pub z: Vec<f64>,
    /// `c^T z` when optimal, `+inf` when infeasible, `-inf` when unbounded.
    pub objective: f64,
    /// Row multipliers `[y_ub; y_eq]` from the final basis (`y_ub <= 0`);
    /// empty unless optimal.
    pub duals: Vec<f64>,
    /// Simplex iterations over both phases.
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Lagrangian dual bound for multipliers `y = [y_ub; y_eq]`: `b^T y` plus the
/// best bound contribution of the reduced costs `c - A^T y`. Returns `None`
/// when `y` is not dual feasible (positive `y_ub`, or a reduced cost pointing
/// at an infinite bound, beyond `tol`).
pub fn dual_bound(problem: &LpProblem, y: &[f64], tol: f64) -> Option<f64> {
    let m_ub = problem.b_ub.len();
    let (y_ub, y_eq) = y.split_at(m_ub);
    if y_ub.iter().any(|&v| v > tol) {
        return None;
    }
    let y_ub = nalgebra::DVector::from_iterator(m_ub, y_ub.iter().map(|v| v.min(0.0)));
    let y_eq = nalgebra::DVector::from_column_slice(y_eq);
    let reduced = nalgebra::DVector::from_column_slice(&problem.c)
        - problem.a_ub.tr_mul(&y_ub)
        - problem.a_eq.tr_mul(&y_eq);
    let mut bound: f64 = problem
        .b_ub
        .iter()
        .zip(y_ub.iter())
        .map(|(b, y)| b * y)
        .sum::<f64>()
        + problem
            .b_eq
            .iter()
            .zip(y_eq.iter())
            .map(|(b, y)| b * y)
            .sum::<f64>();
    for (j, d) in reduced.iter().enumerate() {
        if d.abs() <= tol {
            continue;
        }
        let limit = if *d > 0.0 {
            problem.lb[j]
        } else {
            problem.ub[j]
        };
        if !limit.is_finite() {
            return None;
        }
        bound += d * limit;
    }
    Some(bound)
}
