//! Time-varying state constraints: the rotating keep-out halfspace during
//! rendezvous and the polyhedral approach corridor during docking.
//!
//! cargo run --example constraint_geometry

use nalgebra::Vector3;
use rvd_planner::cli_io::load_scenario;
use rvd_planner::constraints::{cone_contains, docking_polytope, schedule, Phase};

fn main() -> rvd_planner::Result<()> {
    let config = load_scenario(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenarios/table1.json"
    ))?;
    let horizon = 40;
    let m = config.maneuver(Some(horizon))?;
    let k0 = m.k0();
    let lambda = m.params.rendezvous_steps(horizon);
    println!(
        "N = {horizon}, N_d = {}, rendezvous for k - k0 <= {lambda}",
        m.params.n_d
    );

    for k in [k0, k0 + 10, k0 + 20, k0 + 30, k0 + 31, k0 + 39] {
        let set = schedule(k, horizon, &m.params, &m.x0.position(), &m.reference);
        let phase = m.params.phase(k, k0, horizon);
        match phase {
            Phase::Rendezvous => {
                let h = &set.rows[0];
                let nu = -h.a;
                println!(
                    "k = {k:>2} {:<10} normal [{:+.4}, {:+.4}, {:+.4}]  offset {:.4}",
                    phase.as_str(),
                    nu.x,
                    nu.y,
                    nu.z,
                    -h.b
                );
            }
            Phase::Docking => println!(
                "k = {k:>2} {:<10} {} corridor faces",
                phase.as_str(),
                set.len()
            ),
        }
    }

    // the corridor polytope sits inside the circular cone it approximates
    let xpd = m.reference.at(k0 + horizon).position();
    let alpha = m.params.alpha;
    let corridor = docking_polytope(&xpd, alpha);
    let d = xpd.normalize();
    let side = d.cross(&Vector3::z()).normalize();
    println!(
        "\nlateral offsets at depth 0.01 along the docking axis (alpha = {:.1} deg):",
        alpha.to_degrees()
    );
    for frac in [0.0, 0.5, 0.7, 0.71, 0.9, 1.0, 1.1] {
        let xi = xpd + 0.01 * d + frac * 0.01 * alpha.tan() * side;
        println!(
            "  {frac:.2} of cone radius: polytope {:<5} cone {}",
            corridor.contains(&xi, 0.0),
            cone_contains(&xi, &xpd, alpha, 0.0)
        );
    }
    Ok(())
}
