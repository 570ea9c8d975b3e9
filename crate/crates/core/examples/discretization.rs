//! Zero-order-hold HCW model, reachability matrices and minimum-energy
//! transfers for the bundled `table1` scenario.
//!
//! cargo run --example discretization

use std::f64::consts::PI;

use rvd_planner::cli_io::load_scenario;
use rvd_planner::dynamics::{ControlSequence, DiscreteModel, ReachabilityTable};

fn main() -> rvd_planner::Result<()> {
    let tau = 2.0 * PI / 256.0;
    let model = DiscreteModel::discretize(tau);
    println!("tau_s = {tau:.6} (one orbit = 256 samples)");
    println!("A = {:.6}", model.a);
    println!("B = {:.6}", model.b);

    let config = load_scenario(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenarios/table1.json"
    ))?;
    let m = config.maneuver(Some(40))?;
    let table = ReachabilityTable::new(&m.model, 40);
    println!("\n  N  rank-deficit  residual       ||e||_1    ||e||_2");
    for n in [1, 2, 5, 10, 20, 26, 40] {
        let target = m.reference.at(m.k0() + n);
        let (e, residual) = table.min_energy(&m.x0, target, n)?;
        let l1: f64 = e.iter().map(|v| v.abs()).sum();
        // the pseudoinverse only reaches every target once R_N has full row rank
        let rank = table.reach(n).rank(1e-12 * table.reach(n).norm());
        println!(
            "{n:>3}  {:>12}  {residual:.3e}  {l1:>10.5}  {:>9.5}",
            6 - rank.min(6),
            e.norm()
        );
    }

    let n = 26;
    let (e, _) = table.min_energy(&m.x0, m.reference.at(m.k0() + n), n)?;
    let controls = ControlSequence::from_stacked(&e);
    let states = m.model.propagate(&m.x0, &controls);
    let miss = (states[n].0 - m.reference.at(m.k0() + n).0).amax();
    println!(
        "\nreplayed N = {n} transfer: terminal miss {miss:.2e}, peak |u| = {:.3}",
        controls.max_abs()
    );
    Ok(())
}
