mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nalgebra::Vector3;
use tempfile::TempDir;

use rvd_planner::cli_io::commands::{
    COMPARE_HEADER, PLAN_HEADER, PROFILE_HEADER, REFERENCE_HEADER,
};
use rvd_planner::dynamics::ControlSequence;

fn rvd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rvd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, command: &str, scenario: &str, extra: &[&str]) -> Output {
    let config = common::scenario_path(scenario);
    let mut args = vec![
        command,
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    rvd(&args)
}

fn rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (
        header,
        lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect(),
    )
}

/// Re-reads `plan.csv` as plain numbers, renormalizes the accelerations and
/// replays them from the scenario's initial state.
#[test]
fn plan_csv_replays_within_serialization_tolerance() {
    for name in ["table1", "envisat_p1", "envisat_p2"] {
        let dir = TempDir::new().unwrap();
        let out = run_in(dir.path(), "plan", name, &[]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("N_hat="));

        let (header, table) = rows(&dir.path().join("plan.csv"));
        assert_eq!(header, PLAN_HEADER);
        let c = common::scenario(name);
        let m = c.maneuver(None).unwrap();
        let num = |r: &[String], i: usize| r[i].parse::<f64>().unwrap();
        let controls = ControlSequence(
            table[..table.len() - 1]
                .iter()
                .map(|r| Vector3::new(num(r, 8), num(r, 9), num(r, 10)) / c.a_max)
                .collect(),
        );
        assert!(controls.max_abs() <= 1.0 + 1e-8);
        let states = m.model.propagate(&m.x0, &controls);
        let report = m.replay_report(&controls, &states);
        assert!(report.is_valid(1e-6), "{name}: {report:?}");

        let scales = c.scales().unwrap();
        for (r, x) in table.iter().zip(&states) {
            let p = Vector3::new(num(r, 2), num(r, 3), num(r, 4)) * scales.position_scale();
            assert!((p - x.position()).amax() < 1e-9, "{name}");
        }
        let last = table.last().unwrap();
        assert_eq!(last[11], "docking");
        assert!(table
            .iter()
            .all(|r| r[11] == "rendezvous" || r[11] == "docking"));
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let infeasible = run_in(dir.path(), "plan", "table1", &["--n-ub", "20"]);
    assert_eq!(infeasible.status.code(), Some(2));
    let (header, table) = rows(&dir.path().join("plan.csv"));
    assert_eq!(header, PLAN_HEADER);
    assert!(table.is_empty());

    let missing = rvd(&[
        "plan",
        "--config",
        dir.path().join("nope.json").to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(1));

    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(common::scenario_path("table1")).unwrap())
            .unwrap();
    doc.as_object_mut().unwrap().remove("eta");
    let broken = dir.path().join("broken.json");
    fs::write(&broken, doc.to_string()).unwrap();
    let out = rvd(&["plan", "--config", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta"));

    let zero = run_in(dir.path(), "plan", "table1", &["--n-ub", "0"]);
    assert_eq!(zero.status.code(), Some(1));
    assert_eq!(rvd(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rvd(&["--help"]).status.code(), Some(0));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        assert_eq!(
            run_in(dir.path(), "plan", "envisat_p1", &[]).status.code(),
            Some(0)
        );
        assert_eq!(
            run_in(
                dir.path(),
                "sweep",
                "envisat_p1",
                &["--n-ub", "70", "--workers", "3"]
            )
            .status
            .code(),
            Some(0)
        );
        assert_eq!(
            run_in(dir.path(), "propagate", "envisat_p1", &[])
                .status
                .code(),
            Some(0)
        );
    }
    for file in ["plan.csv", "profile.csv", "reference.csv"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn zero_weight_sweep_costs_the_horizon() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        "sweep",
        "table1",
        &["--gamma", "0", "--n-ub", "40"],
    );
    assert_eq!(out.status.code(), Some(0));
    let (header, table) = rows(&dir.path().join("profile.csv"));
    assert_eq!(header, PROFILE_HEADER);
    assert_eq!(table.len(), 40);
    for r in &table {
        let n: usize = r[0].parse().unwrap();
        let feasible = r[1] == "true";
        assert_eq!(feasible, n >= 26, "N = {n}");
        if feasible {
            assert_eq!(r[2].parse::<f64>().unwrap(), n as f64);
        } else {
            assert_eq!(r[2], "inf");
        }
    }
}

#[test]
fn single_weight_compare_row() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        "compare",
        "table1",
        &["--gamma-grid", "4:4:1", "--n-ub", "60"],
    );
    assert_eq!(out.status.code(), Some(0));
    let (header, table) = rows(&dir.path().join("compare.csv"));
    assert_eq!(header, COMPARE_HEADER);
    assert_eq!(table.len(), 1);
    assert_eq!(table[0][0].parse::<f64>().unwrap(), 4.0);
    let j_star: f64 = table[0][4].parse().unwrap();
    let j_hat: f64 = table[0][5].parse().unwrap();
    assert!(j_star <= j_hat);
}

#[test]
fn reference_track_for_static_and_precessing_targets() {
    let dir = TempDir::new().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(common::scenario_path("table1")).unwrap())
            .unwrap();
    doc["spin"]["omega0"] = serde_json::json!([0.0, 0.0, 0.0]);
    let still = dir.path().join("still.json");
    fs::write(&still, doc.to_string()).unwrap();
    let out = rvd(&[
        "propagate",
        "--config",
        still.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--n-ub",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, table) = rows(&dir.path().join("reference.csv"));
    assert_eq!(header, REFERENCE_HEADER);
    assert_eq!(table.len(), 11);
    assert!(table.iter().all(|r| r[2..] == table[0][2..]));

    assert_eq!(
        run_in(dir.path(), "propagate", "envisat_p2", &[])
            .status
            .code(),
        Some(0)
    );
    let (_, table) = rows(&dir.path().join("reference.csv"));
    let num = |r: &[String], i: usize| r[i].parse::<f64>().unwrap();
    let radius = num(&table[0], 14);
    for r in &table {
        let p = Vector3::new(num(r, 2), num(r, 3), num(r, 4));
        assert!((p.norm() - radius).abs() < 1e-9 * radius);
        assert!((num(r, 14) - radius).abs() < 1e-9 * radius);
    }
}
