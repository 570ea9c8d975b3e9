//! Variable-horizon planning with the pruned candidate set, the
//! minimum-energy initial guess and the local descent.
//!
//! cargo run --example plan [scenario.json] [gamma]

use rvd_planner::cli_io::load_scenario;
use rvd_planner::search::plan;

fn main() -> rvd_planner::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/table1.json").into());
    let config = load_scenario(&path)?;
    let gamma = args
        .next()
        .map_or(config.gamma, |g| g.parse().expect("gamma is a number"));
    let m = config.maneuver(None)?;

    let result = plan(&m, gamma)?;
    let d = &result.diagnostics;
    println!("{} at gamma = {gamma}: {:?}", config.name, result.status);
    println!(
        "candidate set {} of {} horizons, initial guess {:?}, first feasible {:?}",
        d.feasible_set_size,
        m.n_ub(),
        d.initial_guess,
        d.first_feasible
    );
    println!("LPs solved {}: {:?}", d.lps_solved, d.cost_log);
    if let Some(s) = &result.solution {
        let scales = m.reference.scales();
        println!(
            "N_hat = {} ({:.0} s), J = {:.4}, fuel = {:.4} (L1 delta-v {:.3} m/s)",
            s.horizon,
            s.horizon as f64 * scales.sample_period(),
            s.cost,
            s.fuel,
            s.fuel * config.a_max * scales.sample_period()
        );
    }
    Ok(())
}
