//! Docking-point trajectory of the tumbling target: closed form against
//! RK4, and the reference samples the planner tracks.
//!
//! cargo run --example docking_reference [scenario.json]

use rvd_planner::cli_io::load_scenario;
use rvd_planner::target_motion::{propagate_docking_point, propagate_docking_point_rk4};

fn main() -> rvd_planner::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/envisat_p1.json").into()
    });
    let config = load_scenario(&path)?;
    let scales = config.scales()?;
    let spin = config.spin_model();
    let p0 = nalgebra::Vector3::from(config.p0_docking);
    println!(
        "{}: |p| = {:.3} m, spin period {:?}",
        config.name,
        p0.norm(),
        spin.spin_period()
    );

    println!("\n  t [s]      x [m]      y [m]      z [m]   RK4 gap [m]");
    for t in [0.0, 30.0, 60.0, 120.0, 300.0, 600.0] {
        let exact = propagate_docking_point(&p0, &spin, config.t0, config.t0 + t, config.eta)?;
        let rk4 = propagate_docking_point_rk4(&p0, &spin, config.t0, config.t0 + t, config.eta)?;
        println!(
            "{t:>7.0} {:>10.4} {:>10.4} {:>10.4}   {:.2e}",
            exact.p.x,
            exact.p.y,
            exact.p.z,
            (exact.p - rk4.p).amax()
        );
    }

    let reference = config.reference(64)?;
    println!(
        "\nnormalized reference, every 16th sample from k0 = {}:",
        scales.k0
    );
    for k in (scales.k0..=scales.k0 + 64).step_by(16) {
        let x = reference.at(k);
        let p = x.position();
        println!(
            "  k = {k:>3}  p = [{:+.5}, {:+.5}, {:+.5}]  |v| = {:.5}",
            p.x,
            p.y,
            p.z,
            x.velocity().norm()
        );
    }
    Ok(())
}
