// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Every test prints one `PASS`/`FAIL` line with the
//! measured quantities, then asserts the same condition.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qmapsim_cli::{recover, Experiment, ExperimentConfig, Grid};
use qmapsim_core::circuit::{channel_of, circuit_of_extremal};
use qmapsim_core::decomp::{balance, decompose_full, extremal_split, split_cp};
use qmapsim_core::mastereq::{fig3_spec, propagate_default, thermal_spec, Direction};
use qmapsim_core::qmap::{cp_defect, from_bloch, Axis, BlochVector, QubitOperator, SuperOp};
use qmapsim_core::random;
use qmapsim_core::sampler::{estimate_expectation, ReadoutModel, ShotPlan, ShotSampler};
use rand::Rng;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[{verdict}] criterion {id:>2} {name}: {detail}");
}

#[test]
fn criterion_01_decomposition_reconstruction() {
    let start = Instant::now();
    let mut r = random::rng(101);
    let mut worst = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut non_cp = 0;
    for _ in 0..1000 {
        let sigma = random::general_map(&mut r);
        let w = balance(&split_cp(&sigma).unwrap()).unwrap();
        worst = worst.max(w.reconstruct().max_abs_diff(&sigma));
        for m in [&w.lambda_plus, &w.lambda_minus] {
            min_eig = min_eig.min(cp_defect(m).unwrap());
        }
        let dm = decompose_full(&sigma).unwrap();
        worst = worst.max(dm.reconstruct().max_abs_diff(&sigma));
        non_cp += usize::from(w.p > 0.0);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-9 && min_eig >= -1e-10 && secs <= 10.0;
    report(
        1,
        "decomposition reconstruction",
        pass,
        format!(
            "max error {worst:.2e}, min Choi eigenvalue of parts {min_eig:.2e}, \
             {non_cp}/1000 non-CP, {secs:.2} s"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_extremal_convexity() {
    let start = Instant::now();
    let mut r = random::rng(202);
    let mut worst = 0.0f64;
    let mut completeness = 0.0f64;
    for _ in 0..1000 {
        let ch = random::cptp(&mut r);
        let (a, b) = extremal_split(&ch).unwrap();
        worst = worst.max(((a.superop() + b.superop()) * 0.5).max_abs_diff(&ch));
        for e in [a, b] {
            let [k0, k1] = e.kraus();
            let s = k0.dagger() * k0 + k1.dagger() * k1;
            completeness = completeness.max(s.max_abs_diff(&QubitOperator::identity()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-9 && completeness <= 1e-12 && secs <= 10.0;
    report(
        2,
        "extremal convexity",
        pass,
        format!("max error {worst:.2e}, Kraus completeness {completeness:.2e}, {secs:.2} s"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_circuit_fidelity() {
    let mut r = random::rng(303);
    let mut worst = 0.0f64;
    let mut cnots_ok = true;
    for _ in 0..1000 {
        let ch = random::extremal(&mut r);
        let circ = circuit_of_extremal(&ch);
        cnots_ok &= circ.cnot_count() == 2;
        worst = worst.max(channel_of(&circ).max_abs_diff(&ch.superop()));
    }
    let pass = worst <= 1e-10 && cnots_ok;
    report(
        3,
        "circuit fidelity",
        pass,
        format!("max channel error {worst:.2e}, two CNOTs each: {cnots_ok}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_known_channel_oracles() {
    let p_t = decompose_full(&SuperOp::transpose_map()).unwrap().p;
    let q = 0.2;
    let inv_dep =
        SuperOp::identity() * (1.0 / (1.0 - q)) - SuperOp::full_depolarization() * (q / (1.0 - q));
    let p_d = decompose_full(&inv_dep).unwrap().p;
    let damping = SuperOp::amplitude_damping(0.36);
    let (e1, e2) = extremal_split(&damping).unwrap();
    let want = 0.8f64.asin();
    let angle_err = [e1.mu, e1.nu, e2.mu, e2.nu]
        .iter()
        .fold(0.0f64, |m, a| m.max((a - want).abs()));
    let recon = ((e1.superop() + e2.superop()) * 0.5).max_abs_diff(&damping);
    let pass = (p_t - 0.5).abs() <= 1e-10
        && (p_d - 0.1875).abs() <= 1e-10
        && angle_err <= 1e-9
        && recon <= 1e-9;
    report(
        4,
        "known-channel oracles",
        pass,
        format!(
            "transpose p = {p_t:.12}, inverse depolarizing p = {p_d:.12}, \
             damping angle error {angle_err:.2e}, reconstruction {recon:.2e}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_thermal_physics() {
    let spec = thermal_spec(1.0, 1.0, 1.0, Direction::Forward);
    let rho0 = QubitOperator::basis_state(0);
    let pop = propagate_default(&spec, 0.0, 8.0)
        .unwrap()
        .map
        .apply(&rho0)
        .excited_population();
    let want = 1.0 / (1.0 + std::f64::consts::E);
    let pop_err = (pop - want).abs();
    let mut r = random::rng(505);
    let mut semigroup = 0.0f64;
    for _ in 0..10 {
        let mut v = [
            r.gen_range(0.0..3.0),
            r.gen_range(0.0..3.0),
            r.gen_range(0.0..3.0),
        ];
        v.sort_by(f64::total_cmp);
        let [s, u, t] = v;
        let whole = propagate_default(&spec, s, t).unwrap().map;
        let late = propagate_default(&spec, u, t).unwrap().map;
        let early = propagate_default(&spec, s, u).unwrap().map;
        semigroup = semigroup.max(late.compose(&early).max_abs_diff(&whole));
    }
    let pass = pop_err <= 1e-6 && semigroup <= 1e-7;
    report(
        5,
        "thermal physics",
        pass,
        format!(
            "population(8) = {pop:.9} vs {want:.9} (error {pop_err:.2e}), \
             semigroup defect {semigroup:.2e}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_non_cp_certification() {
    let spec = fig3_spec();
    let short = cp_defect(&propagate_default(&spec, 0.20, 0.25).unwrap().map).unwrap();
    let grid = Grid::new(0.0, 1.2, 61).points();
    let (worst_t, worst) = grid
        .iter()
        .map(|&t| {
            (
                t,
                cp_defect(&propagate_default(&spec, 0.0, t).unwrap().map).unwrap(),
            )
        })
        .fold(
            (0.0, f64::INFINITY),
            |acc, x| if x.1 < acc.1 { x } else { acc },
        );
    let first = short < -1e-6;
    let second = worst >= -1e-8;
    let pass = first && second;
    report(
        6,
        "non-CP certification",
        pass,
        format!(
            "cp_defect(Λ_(0.25,0.20)) = {short:.3e} (needs < -1e-6: {first}); \
             min over grid of cp_defect(Λ_(t,0)) = {worst:.3e} at t = {worst_t:.2} \
             (needs ≥ -1e-8: {second})"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_recovery() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        experiment: Some(Experiment::Recover),
        plan: ShotPlan::new(10_000, 0, 1),
        ..Default::default()
    };
    let rows = recover::run(&cfg).unwrap();
    let t_end = cfg.grid().unwrap().t_max;
    let finals: Vec<_> = rows.iter().filter(|r| r.time == t_end).collect();
    let exact = finals.iter().map(|r| r.fidelity_exact).fold(1.0, f64::min);
    let sampled = finals
        .iter()
        .map(|r| r.fidelity_sampled.unwrap())
        .fold(1.0, f64::min);
    let secs = start.elapsed().as_secs_f64();
    let pass = finals.len() == 4 && exact >= 1.0 - 1e-7 && sampled >= 0.98 && secs <= 60.0;
    report(
        7,
        "recovery",
        pass,
        format!(
            "min final fidelity exact {exact:.10}, sampled {sampled:.6} \
             over {} states, {secs:.2} s",
            finals.len()
        ),
    );
    assert!(pass);
}

/// Mixed input with shot-to-shot variance under every branch.
fn probe_state() -> QubitOperator {
    from_bloch(&BlochVector::new(0.4, -0.3, 0.2))
}

fn reversed_thermal_half() -> (qmapsim_core::decomp::DecomposedMap, SuperOp) {
    let spec = thermal_spec(1.0, 1.0, 1.0, Direction::Reversed);
    let lam = propagate_default(&spec, 0.0, 0.5).unwrap().map;
    (decompose_full(&lam).unwrap(), lam)
}

#[test]
fn criterion_08_sampler_unbiasedness() {
    let (dm, lam) = reversed_thermal_half();
    let rho = probe_state();
    let exact = lam.apply(&rho).expectation(Axis::Z);
    let sampler = ShotSampler::new(&dm, &rho, Axis::Z, None, false).unwrap();
    let mut means = Vec::new();
    let mut var_sum = 0.0;
    let mut values_ok = true;
    for seed in 0..20u64 {
        let plan = ShotPlan::new(10_000, seed, 1);
        let e = sampler.estimate(&plan).unwrap();
        means.push(e.mean);
        var_sum += e.std_error * e.std_error;
        values_ok &= (0..plan.shots).all(|i| sampler.draw(seed, i).value.abs() == dm.overhead());
    }
    let pooled = means.iter().sum::<f64>() / means.len() as f64;
    let pooled_se = var_sum.sqrt() / means.len() as f64;
    let dev = (pooled - exact).abs();
    let pass = pooled_se > 0.0 && dev <= 4.0 * pooled_se && values_ok;
    report(
        8,
        "sampler unbiasedness",
        pass,
        format!(
            "p = {:.4}, pooled {pooled:.5} vs exact {exact:.5}, |dev| = {dev:.2e} \
             = {:.2} pooled SE, shot values ±(1+2p) only: {values_ok}",
            dm.p,
            dev / pooled_se
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_readout_mitigation() {
    let (dm, _) = reversed_thermal_half();
    let rho = probe_state();
    let model = ReadoutModel::new(0.1, 0.1).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let plan = ShotPlan::new(10_000, 1000 + seed, 1);
        let clean = estimate_expectation(&dm, &rho, Axis::Z, &plan, None, false).unwrap();
        let mit = estimate_expectation(&dm, &rho, Axis::Z, &plan, Some(&model), true).unwrap();
        let se = (clean.std_error.powi(2) + mit.std_error.powi(2)).sqrt();
        worst = worst.max((mit.mean - clean.mean).abs() / se);
    }
    let pass = worst <= 5.0;
    report(
        9,
        "readout mitigation",
        pass,
        format!("largest |mitigated − clean| over 20 seeds = {worst:.2} standard errors"),
    );
    assert!(pass);
}

fn run_cli(dir: &Path, args: &[&str]) -> Vec<(String, Vec<u8>)> {
    let status = Command::new(env!("CARGO_BIN_EXE_qmapsim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run qmapsim");
    assert!(status.status.success(), "{args:?}: {status:?}");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_10_determinism() {
    let invocations: [&[&str]; 3] = [
        &["recover", "--shots", "2000", "--runs", "1", "--seed", "7"],
        &["timelocal", "--shots", "2000", "--runs", "1", "--seed", "7"],
        &["decompose"],
    ];
    let mut identical = true;
    let mut compared = 0;
    for args in invocations {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let fa = run_cli(a.path(), args);
        let fb = run_cli(b.path(), args);
        identical &= !fa.is_empty() && fa == fb;
        compared += fa.len();
    }
    let pass = identical;
    report(
        10,
        "determinism",
        pass,
        format!("{compared} output files byte-identical across repeated runs: {identical}"),
    );
    assert!(pass);
}
