// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use qmapsim_cli::timelocal::{self, Series, TimelocalRow};
use qmapsim_cli::{decompose, recover, CliError, Experiment, ExperimentConfig, Overrides};
use qmapsim_core::decomp::{decompose_full, DecomposedMap};
use qmapsim_core::mastereq::{default_steps, fig3_spec, propagate, thermal_spec, Direction};
use qmapsim_core::qmap::{QubitOperator, SuperOp};
use qmapsim_core::sampler::ShotPlan;
use qmapsim_core::QmapError;

fn qmapsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmapsim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run qmapsim")
}

fn config(experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig {
        experiment: Some(experiment),
        ..Default::default()
    }
}

fn qgl_files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().to_string_lossy().into_owned();
            name.ends_with(".qgl").then_some(name)
        })
        .collect();
    v.sort();
    v
}

#[test]
fn recover_exact_returns_to_initial_states() {
    let cfg = ExperimentConfig {
        exact_only: true,
        ..config(Experiment::Recover)
    };
    let rows = recover::run(&cfg).unwrap();
    assert_eq!(rows.len(), 4 * 41);
    for r in rows.iter().filter(|r| r.time == 2.0) {
        assert!(r.fidelity_exact >= 1.0 - 1e-7, "{r:?}");
        assert!(r.sampled.is_none());
    }
    // the purity drops on the way out, so the midpoint is far from ρ₀
    let mid = rows
        .iter()
        .find(|r| r.state_id == 2 && r.time == 1.0)
        .unwrap();
    assert!(mid.fidelity_exact < 0.9);
}

#[test]
fn recover_is_continuous_at_t_star() {
    let cfg = config(Experiment::Recover);
    let t_star = cfg.t_star;
    let maps = recover::path_maps(&cfg, &[t_star, t_star + 1e-12]).unwrap();
    assert!(maps[0].max_abs_diff(&maps[1]) < 1e-9);
}

fn timelocal_rows(plan: ShotPlan, exact_only: bool) -> Vec<TimelocalRow> {
    let cfg = ExperimentConfig {
        plan,
        exact_only,
        ..config(Experiment::Timelocal)
    };
    timelocal::run(&cfg).unwrap().rows
}

fn series(rows: &[TimelocalRow], s: Series) -> Vec<&TimelocalRow> {
    rows.iter().filter(|r| r.series == s).collect()
}

#[test]
fn timelocal_series_relations() {
    let rows = timelocal_rows(ShotPlan::default(), true);
    let a = series(&rows, Series::A);
    let b = series(&rows, Series::B);
    let c = series(&rows, Series::C);
    assert_eq!(a.len(), 61);
    assert_eq!(b.len(), 51);
    for rb in &b {
        let ra = a.iter().find(|r| r.time == rb.time).unwrap();
        assert!((ra.population_exact - rb.population_exact).abs() <= 1e-7);
    }
    let gap = b
        .iter()
        .zip(&c)
        .map(|(x, y)| (x.population_exact - y.population_exact).abs())
        .fold(0.0, f64::max);
    assert!(gap > 0.01, "memoryless gap {gap}");
    let tp = ExperimentConfig::default().t_prime;
    let early = propagate(&fig3_spec(), tp, tp + 0.05, 50).unwrap().map;
    assert!(qmapsim_core::qmap::cp_defect(&early).unwrap() < 0.0);
}

#[test]
fn timelocal_exact_columns_match_refined_integration() {
    let rows = timelocal_rows(ShotPlan::default(), true);
    let spec = fig3_spec();
    let rho0 = QubitOperator::basis_state(0);
    for r in series(&rows, Series::A) {
        let steps = 4 * default_steps(0.0, r.time);
        let fine = propagate(&spec, 0.0, r.time, steps).unwrap().map;
        assert!((fine.apply(&rho0).excited_population() - r.population_exact).abs() <= 1e-6);
    }
}

#[test]
fn timelocal_sampled_columns_track_exact() {
    let rows = timelocal_rows(ShotPlan::default(), false);
    let sampled: Vec<_> = rows
        .iter()
        .filter(|r| r.population_sampled.is_some())
        .collect();
    assert_eq!(sampled.len(), 61 + 2 * 51);
    let within = sampled
        .iter()
        .filter(|r| {
            let d = (r.population_sampled.unwrap() - r.population_exact).abs();
            d <= 5.0 * r.stderr.unwrap() + 1e-9
        })
        .count();
    assert!(
        within as f64 >= 0.99 * sampled.len() as f64,
        "{within}/{}",
        sampled.len()
    );
}

#[test]
fn decompose_identity_writes_two_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({ "superop": SuperOp::identity() });
    std::fs::write(dir.path().join("id.json"), cfg.to_string()).unwrap();
    let out = qmapsim(
        dir.path(),
        &["decompose", "--config", "id.json", "--out", "ident.json"],
    );
    assert!(out.status.success(), "{out:?}");
    assert_eq!(
        qgl_files(dir.path()),
        ["ident_branch0.qgl", "ident_branch1.qgl"]
    );
    let text = std::fs::read_to_string(dir.path().join("ident.json")).unwrap();
    let dm: DecomposedMap = serde_json::from_str(&text).unwrap();
    assert_eq!(dm.p, 0.0);
}

#[test]
fn decompose_reversed_thermal_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmapsim(dir.path(), &["decompose", "--out", "rev/thermal.json"]);
    assert!(out.status.success(), "{out:?}");
    let sub = dir.path().join("rev");
    assert_eq!(qgl_files(&sub).len(), 4);
    let dm: DecomposedMap =
        serde_json::from_str(&std::fs::read_to_string(sub.join("thermal.json")).unwrap()).unwrap();
    let spec = thermal_spec(1.0, 1.0, 1.0, Direction::Reversed);
    let lam = propagate(&spec, 0.0, 1.0, default_steps(0.0, 1.0))
        .unwrap()
        .map;
    let lib = decompose_full(&lam).unwrap();
    assert!(dm.p > 0.0);
    assert_eq!(dm.p, lib.p);
    assert!(dm.reconstruct().max_abs_diff(&lam) <= 1e-9);
    let qgl = std::fs::read_to_string(sub.join("thermal_branch0.qgl")).unwrap();
    let circ = qmapsim_core::circuit::import_text(&qgl).unwrap();
    assert_eq!(circ.cnot_count(), 2);
}

#[test]
fn decompose_library_matches_binary_json() {
    let cfg = config(Experiment::Decompose);
    let d = decompose::run(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    assert!(qmapsim(dir.path(), &["decompose"]).status.success());
    let text = std::fs::read_to_string(dir.path().join("decomposition.json")).unwrap();
    assert_eq!(text, d.json);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"t_star": 0.5, "exact_only": false, "plan": {"shots": 1, "runs": 1}}"#,
    )
    .unwrap();
    let out = qmapsim(
        dir.path(),
        &[
            "recover",
            "--config",
            "cfg.json",
            "--t-star",
            "0.25",
            "--exact-only",
        ],
    );
    assert!(out.status.success(), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("recover.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("5.000000000000e-01,3,"), "{last}");
    // exact-only leaves the sampled columns empty
    assert!(last.contains(",,,,,,,"));
    assert_eq!(csv.lines().next().unwrap(), recover::HEADER);
}

#[test]
fn overrides_apply_in_library() {
    let mut cfg = config(Experiment::Recover);
    Overrides {
        shots: Some(3),
        seed: Some(9),
        runs: Some(2),
        ..Default::default()
    }
    .apply(&mut cfg);
    assert_eq!(cfg.plan, ShotPlan::new(3, 9, 2));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    std::fs::write(dir.path().join("unknown.json"), r#"{"t_stra": 1}"#).unwrap();
    let not_tp = serde_json::json!({ "superop": SuperOp::identity() * 2.0 });
    std::fs::write(dir.path().join("not_tp.json"), not_tp.to_string()).unwrap();
    let grid = r#"{"grid": {"t_min": 0, "t_max": 1, "n_points": 11}}"#;
    std::fs::write(dir.path().join("grid.json"), grid).unwrap();
    for args in [
        &["recover", "--config", "bad.json"][..],
        &["recover", "--config", "unknown.json"],
        &["recover", "--config", "grid.json", "--t-star", "3"],
        &["timelocal", "--t-prime", "-1", "--exact-only"],
        &["recover", "--shots", "0"],
        &["decompose", "--config", "not_tp.json"],
        &["recover", "--bogus"],
    ] {
        let out = qmapsim(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {out:?}");
    }
}

#[test]
fn missing_config_file_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmapsim(dir.path(), &["recover", "--config", "nowhere.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.json"));
}

#[test]
fn numerical_errors_map_to_3() {
    let e: CliError = QmapError::Singular { condition: 1e15 }.into();
    assert_eq!(e.exit_code(), 3);
    let e: CliError = QmapError::Numerical("x".into()).into();
    assert_eq!(e.exit_code(), 3);
    let e: CliError = QmapError::InvalidInput("x".into()).into();
    assert_eq!(e.exit_code(), 2);
}
