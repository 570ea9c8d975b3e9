//! Planner against exhaustive enumeration and a ternary-search baseline
//! over a range of time/fuel weights.
//!
//! cargo run --release --example gamma_compare [scenario.json]

use rvd_planner::cli_io::commands::compare_one;
use rvd_planner::cli_io::load_scenario;
use rvd_planner::search::MEMBERSHIP_TOL;

fn main() -> rvd_planner::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/table1.json").into());
    let config = load_scenario(&path)?;
    let m = config.maneuver(None)?;
    let show = |n: Option<usize>| n.map_or("-".to_string(), |n| n.to_string());

    println!("gamma   N*  N_hat  N_bs        J*  J_hat/J*  J_bs/J*  LPs(hat)  LPs(bs)");
    for gamma in [0.0, 1.0, 2.0, 4.0, 7.0, 10.0, 15.0] {
        let row = compare_one(&m, gamma, MEMBERSHIP_TOL)?;
        println!(
            "{gamma:>5} {:>4} {:>6} {:>5} {:>9.4} {:>9.4} {:>8.4} {:>9} {:>8}",
            show(row.n_star),
            show(row.n_hat),
            show(row.n_bs),
            row.j_star,
            row.j_hat / row.j_star,
            row.j_bs / row.j_star,
            row.lps_hat,
            row.lps_bs
        );
    }
    Ok(())
}
