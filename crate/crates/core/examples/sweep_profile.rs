//! Exhaustive sweep of the fixed-horizon cost over every horizon, drawn as
//! a text profile. The cost is not unimodal in N.
//!
//! cargo run --example sweep_profile [scenario.json] [gamma]

use rvd_planner::cli_io::load_scenario;
use rvd_planner::search::{enumerate_all, feasible_set, MEMBERSHIP_TOL};

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
    let set = feasible_set(&m.table, &m.x0, &m.reference, MEMBERSHIP_TOL);

    let profile = enumerate_all(&m, gamma)?;
    let feasible: Vec<_> = profile
        .solutions
        .iter()
        .filter(|s| s.is_optimal())
        .collect();
    let (lo, hi) = feasible
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.cost), hi.max(s.cost))
        });
    println!(
        "{} gamma = {gamma}: {} feasible horizons, best {:?}",
        config.name,
        feasible.len(),
        profile.best
    );
    println!("   N        J  in-set");
    for s in &feasible {
        let bar = ((s.cost - lo) / (hi - lo).max(1e-12) * 60.0).round() as usize;
        let mark = if profile.best == Some(s.horizon) {
            " <- N*"
        } else {
            ""
        };
        let member = if set.horizons.contains(s.horizon) {
            '*'
        } else {
            ' '
        };
        println!(
            "{:>4} {:>8.3}   {member}  {}{mark}",
            s.horizon,
            s.cost,
            "#".repeat(bar + 1)
        );
    }
    Ok(())
}
