//! One fixed-horizon fuel-optimal LP: problem size, solution and an
//! independent replay of the controls through the discrete dynamics.
//!
//! cargo run --example fixed_horizon [N]

use rvd_planner::cli_io::load_scenario;

fn main() -> rvd_planner::Result<()> {
    let horizon: usize = std::env::args()
        .nth(1)
        .map_or(50, |a| a.parse().expect("N is an integer"));
    let config = load_scenario(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenarios/table1.json"
    ))?;
    let m = config.maneuver(None)?;
    let lp = m.build_lp(horizon, config.gamma)?;
    println!(
        "N = {horizon}: {} variables, {} inequality rows, {} equality rows",
        lp.num_vars(),
        lp.b_ub.len(),
        lp.b_eq.len()
    );

    let s = m.solve_fixed_horizon(horizon, config.gamma)?;
    if !s.is_optimal() {
        println!("infeasible at N = {horizon}");
        return Ok(());
    }
    println!(
        "J = {:.5}, fuel = {:.5}, {} simplex iterations",
        s.cost, s.fuel, s.lp_iterations
    );
    let burns = s.controls.0.iter().filter(|u| u.amax() > 1e-9).count();
    println!("{burns} of {horizon} steps fire the thrusters");

    let states = m.model.propagate(&m.x0, &s.controls);
    let report = m.replay_report(&s.controls, &states);
    println!("replay: {report:?}");
    Ok(())
}
