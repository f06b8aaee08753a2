// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

use qmapsim_core::random;

use qmapsim_core::circuit::{channel_of, circuit_of_extremal, simulate};
use qmapsim_core::decomp::{
    balance, decompose_full, extremal_split, kraus_of_extremal, split_cp, BranchSign,
};
use qmapsim_core::linalg;
use qmapsim_core::qmap::{choi_of_map, cp_defect, QubitOperator};
use rand::Rng;

const N: usize = 1000;

#[test]
fn decomposition_reconstructs_general_maps() {
    let mut r = random::rng(1);
    let mut worst = 0.0f64;
    let mut non_cp = 0;
    for i in 0..N {
        let sigma = random::general_map(&mut r);
        let dm = decompose_full(&sigma).unwrap_or_else(|e| panic!("map {i}: {e}"));
        let err = dm.reconstruct().max_abs_diff(&sigma);
        worst = worst.max(err);
        if dm.p > 0.0 {
            non_cp += 1;
        }
        let w: f64 = dm.branches.iter().map(|b| b.weight).sum();
        assert!((w - 1.0).abs() < 1e-12);
        assert_eq!(dm.branches[0].sign, BranchSign::Plus);
        assert_eq!(dm.branches[3].sign, BranchSign::Minus);
    }
    assert!(worst <= 1e-9, "worst reconstruction error {worst:.3e}");
    assert!(non_cp > N / 4, "only {non_cp} non-CP maps drawn");
}

#[test]
fn balanced_parts_are_channels_with_minimal_p() {
    let mut r = random::rng(2);
    for _ in 0..N {
        let sigma = random::general_map(&mut r);
        let diff = split_cp(&sigma).unwrap();
        let w = balance(&diff).unwrap();
        for m in [&w.lambda_plus, &w.lambda_minus] {
            assert!(cp_defect(m).unwrap() >= -1e-10);
            assert!(m.trace_defect() <= 1e-10);
        }
        assert!(w.reconstruct().max_abs_diff(&sigma) <= 1e-10);
        let lmax = if diff.minus.is_empty() {
            0.0
        } else {
            linalg::hermitian_eig(&diff.minus.gram())
                .unwrap()
                .max()
                .max(0.0)
        };
        assert!((w.p - lmax).abs() <= 1e-10);
    }
}

#[test]
fn extremal_split_of_random_channels() {
    let mut r = random::rng(3);
    let mut worst = 0.0f64;
    for i in 0..N {
        let ch = random::cptp(&mut r);
        let (a, b) = extremal_split(&ch).unwrap_or_else(|e| panic!("channel {i}: {e}"));
        let mix = (a.superop() + b.superop()) * 0.5;
        worst = worst.max(mix.max_abs_diff(&ch));
        for e in [a, b] {
            let s = e.superop();
            assert!(cp_defect(&s).unwrap() >= -1e-10);
            assert!(s.trace_defect() <= 1e-10);
            let rank = linalg::hermitian_eig(&choi_of_map(&s).0)
                .unwrap()
                .values
                .iter()
                .filter(|&&l| l > 1e-9)
                .count();
            assert!(rank <= 2);
        }
    }
    assert!(worst <= 1e-9, "worst split error {worst:.3e}");
}

#[test]
fn circuits_realize_their_channels() {
    let mut r = random::rng(4);
    let mut worst = 0.0f64;
    for _ in 0..N {
        let ch = random::extremal(&mut r);
        let circ = circuit_of_extremal(&ch);
        assert_eq!(circ.cnot_count(), 2);
        worst = worst.max(channel_of(&circ).max_abs_diff(&ch.superop()));
        let rho = random::density(&mut r);
        let sim = simulate(&circ, &rho).unwrap();
        assert!((sim.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    assert!(worst <= 1e-10, "worst circuit error {worst:.3e}");
}

#[test]
fn extremal_kraus_completeness() {
    let mut r = random::rng(5);
    let pi = std::f64::consts::PI;
    for _ in 0..100_000 {
        let (f0, f1) = kraus_of_extremal(r.gen_range(-pi..pi), r.gen_range(-pi..pi));
        let s = f0.dagger() * f0 + f1.dagger() * f1;
        assert!(s.max_abs_diff(&QubitOperator::identity()) <= 1e-15);
    }
}
