// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Decomposition of trace- and Hermiticity-preserving qubit maps.
//!
//! `Σ = (1+p)·Λ₊ − p·Λ₋`, and each of `Λ±` is an even mixture of two
//! extremal channels, giving four signed branches.

mod cp;
mod extremal;

pub use cp::{balance, kraus_from_choi_vector, split_cp, CpDifference, KrausSet, WeightedCptp};
pub use extremal::{
    axis_angle, diagonal_form, extremal_split, kraus_of_extremal, rotation_to_su2, su2_to_rotation,
    wrap_angle, AdjointChoiBlocks, DiagonalForm, ExtremalChannel,
};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QmapError, Result};
use crate::qmap::SuperOp;
use crate::tol;

/// Accepted end-to-end reconstruction error of [`decompose_full`].
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchSign {
    Plus,
    Minus,
}

impl BranchSign {
    pub fn value(self) -> f64 {
        match self {
            BranchSign::Plus => 1.0,
            BranchSign::Minus => -1.0,
        }
    }
}

impl Serialize for BranchSign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value() as i8)
    }
}

impl<'de> Deserialize<'de> for BranchSign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match i8::deserialize(d)? {
            1 => Ok(BranchSign::Plus),
            -1 => Ok(BranchSign::Minus),
            other => Err(serde::de::Error::custom(format!(
                "branch sign must be 1 or -1, got {other}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub sign: BranchSign,
    /// Sampling probability.
    pub weight: f64,
    #[serde(flatten)]
    pub channel: ExtremalChannel,
}

/// Four signed extremal branches: two `+` from `Λ₊`, then two `−` from `Λ₋`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposedMap {
    pub p: f64,
    pub branches: [Branch; 4],
}

impl DecomposedMap {
    pub fn overhead(&self) -> f64 {
        1.0 + 2.0 * self.p
    }

    /// `(1+2p)·Σ sign·weight·Λₖ`.
    pub fn reconstruct(&self) -> SuperOp {
        let sum = self.branches.iter().fold(SuperOp::zero(), |acc, b| {
            acc + b.channel.superop() * (b.sign.value() * b.weight)
        });
        sum * self.overhead()
    }

    /// Branches with non-zero sampling weight.
    pub fn active_branches(&self) -> impl Iterator<Item = (usize, &Branch)> {
        self.branches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.weight > 0.0)
    }
}

/// Full pipeline: CP split, rebalancing, extremal split of both parts.
pub fn decompose_full(sigma: &SuperOp) -> Result<DecomposedMap> {
    let tp = sigma.trace_defect();
    let hp = sigma.hermiticity_defect();
    if !(tp <= tol::INTEGRATION && hp <= tol::INTEGRATION) {
        return Err(QmapError::invalid(format!(
            "map is not trace/Hermiticity preserving (defects {tp:.3e}, {hp:.3e})"
        )));
    }
    let weighted = balance(&split_cp(sigma)?)?;
    let p = weighted.p;
    let (a1, a2) = extremal_split(&weighted.lambda_plus)?;
    let (b1, b2) = extremal_split(&weighted.lambda_minus)?;
    let wp = (1.0 + p) / (2.0 * (1.0 + 2.0 * p));
    let wm = p / (2.0 * (1.0 + 2.0 * p));
    let branch = |sign, weight, channel| Branch {
        sign,
        weight,
        channel,
    };
    let dm = DecomposedMap {
        p,
        branches: [
            branch(BranchSign::Plus, wp, a1),
            branch(BranchSign::Plus, wp, a2),
            branch(BranchSign::Minus, wm, b1),
            branch(BranchSign::Minus, wm, b2),
        ],
    };
    let err = dm.reconstruct().max_abs_diff(sigma);
    if !(err <= RECONSTRUCTION_TOL) {
        return Err(QmapError::Numerical(format!(
            "decomposition reconstructs the map only to {err:.3e}"
        )));
    }
    Ok(dm)
}
