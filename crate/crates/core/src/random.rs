// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Random states, unitaries, channels and general maps for tests and
//! benchmarks. Everything is driven by a caller-supplied RNG.

use crate::decomp::{rotation_to_su2, ExtremalChannel};
use crate::linalg::{self, c, Mat2};
use crate::mastereq::{propagate, DecayChannel, Direction, GeneratorSpec, RateFunction};
use crate::qmap::{QubitOperator, SuperOp};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss<R: Rng>(r: &mut R) -> f64 {
    r.sample(StandardNormal)
}

/// Entries with independent standard normal real and imaginary parts.
pub fn complex_matrix<R: Rng>(r: &mut R) -> Mat2 {
    Mat2::from_fn(|_, _| c(gauss(r), gauss(r)))
}

pub fn hermitian<R: Rng>(r: &mut R) -> QubitOperator {
    let m = complex_matrix(r);
    QubitOperator((m + m.adjoint()) * c(0.5, 0.0))
}

/// Rotation about a uniformly random axis by a uniform angle.
pub fn rotation<R: Rng>(r: &mut R) -> Matrix3<f64> {
    let axis = Vector3::new(gauss(r), gauss(r), gauss(r));
    let angle = r.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).into_inner()
}

pub fn unitary<R: Rng>(r: &mut R) -> QubitOperator {
    rotation_to_su2(&rotation(r)).expect("rotation")
}

/// Full-rank density matrix `GG†/tr(GG†)`.
pub fn density<R: Rng>(r: &mut R) -> QubitOperator {
    let g = complex_matrix(r);
    let rho = g * g.adjoint();
    let tr = rho.trace();
    QubitOperator(rho / tr)
}

/// Random channel with 1–4 Kraus operators.
pub fn cptp<R: Rng>(r: &mut R) -> SuperOp {
    let k = r.gen_range(1..=4);
    let ops: Vec<Mat2> = (0..k).map(|_| complex_matrix(r)).collect();
    let s = ops
        .iter()
        .fold(Mat2::zeros(), |acc, g| acc + g.adjoint() * g);
    let s = (s + s.adjoint()) * c(0.5, 0.0);
    let norm = linalg::psd_pinv_sqrt(&s, 1e-14).expect("Hermitian");
    let kraus: Vec<QubitOperator> = ops.iter().map(|g| QubitOperator(g * norm)).collect();
    SuperOp::from_kraus(&kraus)
}

pub fn extremal<R: Rng>(r: &mut R) -> ExtremalChannel {
    let pi = std::f64::consts::PI;
    ExtremalChannel::new(
        unitary(r),
        unitary(r),
        r.gen_range(-pi..pi),
        r.gen_range(-pi..pi),
    )
}

/// Propagator of a random generator with signed constant rates.
pub fn signed_propagator<R: Rng>(r: &mut R) -> SuperOp {
    let n = r.gen_range(1..=3);
    let channels = (0..n)
        .map(|_| DecayChannel {
            jump: QubitOperator(complex_matrix(r) * c(0.5, 0.0)),
            rate: RateFunction::Constant {
                value: r.gen_range(-1.0..1.0),
            },
        })
        .collect();
    let spec = GeneratorSpec {
        hamiltonian: hermitian(r),
        channels,
        sign: if r.gen() {
            Direction::Forward
        } else {
            Direction::Reversed
        },
    };
    let t = r.gen_range(0.05..0.8);
    propagate(&spec, 0.0, t, 100).expect("valid spec").map
}

/// Trace- and Hermiticity-preserving map with a random Bloch action.
pub fn hptp<R: Rng>(r: &mut R) -> SuperOp {
    let t = Vector3::from_fn(|_, _| 0.6 * gauss(r));
    let m = Matrix3::from_fn(|_, _| 0.6 * gauss(r));
    SuperOp::from_pauli_transfer(&t, &m)
}

/// Random general map: a signed propagator, optionally perturbed.
pub fn general_map<R: Rng>(r: &mut R) -> SuperOp {
    match r.gen_range(0..3) {
        0 => signed_propagator(r),
        1 => {
            let base = signed_propagator(r);
            let eps = r.gen_range(0.0..0.3);
            base + (hptp(r) - hptp(r)) * eps
        }
        _ => hptp(r),
    }
}
