//! The bounded simplex solver on a small production-planning LP, with the
//! dual certificate and the plain-text problem dump.
//!
//! cargo run --example simplex_lp

use nalgebra::DMatrix;
use rvd_planner::lp::{check_feasible, dual_bound, solve, LpOptions, LpProblem};

fn main() {
    // maximize 3x + 5y subject to x <= 4, 2y <= 12, 3x + 2y <= 18, x + y = 6
    let mut lp = LpProblem::new(vec![-3.0, -5.0]);
    lp.a_ub = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 3.0, 2.0]);
    lp.b_ub = vec![4.0, 12.0, 18.0];
    lp.a_eq = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
    lp.b_eq = vec![6.0];

    let sol = solve(&lp, &LpOptions::default());
    println!(
        "status {:?} after {} iterations",
        sol.status, sol.iterations
    );
    println!("z = {:?}, objective = {}", sol.z, sol.objective);
    println!("duals = {:?}", sol.duals);
    println!("dual bound = {:?}", dual_bound(&lp, &sol.duals, 1e-9));
    println!("phase-one check: {:?}", check_feasible(&lp, 1e-8));

    let mut dump = Vec::new();
    lp.write_text(&mut dump).expect("writing to memory");
    println!("\n{}", String::from_utf8_lossy(&dump));

    lp.b_eq = vec![20.0];
    println!(
        "with x + y = 20: {:?}",
        solve(&lp, &LpOptions::default()).status
    );
}
