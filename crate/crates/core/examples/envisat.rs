//! Docking to the tumbling EnviSat at two docking points, reported in
//! physical units.
//!
//! cargo run --release --example envisat

use rvd_planner::cli_io::load_scenario;
use rvd_planner::search::plan;

fn main() -> rvd_planner::Result<()> {
    for name in ["envisat_p1", "envisat_p2"] {
        let config = load_scenario(format!(
            "{}/scenarios/{name}.json",
            env!("CARGO_MANIFEST_DIR")
        ))?;
        let m = config.maneuver(None)?;
        let result = plan(&m, config.gamma)?;
        let Some(s) = result.solution else {
            println!("{name}: no feasible horizon");
            continue;
        };
        let scales = m.reference.scales();
        let dt = scales.sample_period();
        let end = scales.denormalize(s.states.last().expect("planned trajectories are nonempty"));
        println!("{name} (gamma = {}):", config.gamma);
        println!(
            "  time of flight {:.0} s ({} samples, {:.4} normalized), {} LPs",
            s.horizon as f64 * dt,
            s.horizon,
            s.horizon as f64 * config.tau_s,
            result.diagnostics.lps_solved
        );
        println!(
            "  L1 delta-v {:.3} m/s, normalized fuel x tau {:.4}",
            s.fuel * config.a_max * dt,
            s.fuel * config.tau_s
        );
        println!(
            "  docked at [{:.3}, {:.3}, {:.3}] m moving {:.4} m/s",
            end.p.x,
            end.p.y,
            end.p.z,
            end.v.norm()
        );
    }
    Ok(())
}
