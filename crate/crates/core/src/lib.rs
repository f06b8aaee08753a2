// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation of general qubit dynamical maps.
//!
//! A general dynamical map is linear, trace preserving and Hermiticity
//! preserving, but need not be positive. This crate splits such a map into a
//! weighted difference of two channels, `Σ = (1+p)Λ₊ − pΛ₋`, writes each
//! channel as an even mixture of two extremal channels, compiles every
//! extremal channel into a two-qubit circuit with one ancilla, and estimates
//! observables by signed Monte Carlo sampling over the four branches.
//!
//! Module map:
//!
//! - [`qmap`]: 2×2 operators, Bloch vectors, superoperators, Choi matrices.
//! - [`linalg`]: small dense kernels (Jacobi eigensolver, PSD square roots).
//! - [`mastereq`]: time-local generators with signed rates and RK4 propagators.
//! - [`decomp`]: CP split, CPTP balancing, extremal decomposition.
//! - [`circuit`]: one-ancilla circuits, exact simulation, gate-list text.
//! - [`sampler`]: quasiprobability estimator and readout mitigation.
//! - [`random`]: random states, channels and maps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod decomp;
pub mod error;
pub mod linalg;
pub mod mastereq;
pub mod qmap;
pub mod random;
pub mod sampler;
mod serde_cplx;

pub use error::{QmapError, Result};

/// Numerical tolerances shared by every module.
pub mod tol {
    /// Construction checks (Hermiticity, unit trace).
    pub const CONSTRUCT: f64 = 1e-12;
    /// Algebraic post-conditions (trace preservation, unitarity, eigen residuals).
    pub const ALGEBRAIC: f64 = 1e-10;
    /// Positivity clipping for fidelity.
    pub const POSITIVITY: f64 = 1e-9;
    /// Off-diagonal norm at which the Jacobi sweep stops.
    pub const JACOBI: f64 = 1e-14;
    /// Choi eigenvalues below this magnitude count as zero in the CP split.
    pub const EIG_CUTOFF: f64 = 1e-12;
    /// Integrated propagators: trace and Hermiticity preservation.
    pub const INTEGRATION: f64 = 1e-8;
    /// Largest accepted condition number for map inversion.
    pub const MAX_CONDITION: f64 = 1e12;
}
