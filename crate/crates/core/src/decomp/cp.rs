// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Difference of CP maps and its rebalancing into a weighted CPTP difference.

use crate::error::{QmapError, Result};
use crate::linalg::{self, Mat2, C64};
use crate::qmap::{choi_of_map, QubitOperator, SuperOp};
use crate::tol;

use nalgebra::Vector4;

/// Kraus representation `ρ ↦ Σ AⱼρAⱼ†`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KrausSet {
    pub ops: Vec<QubitOperator>,
}

impl KrausSet {
    pub fn superop(&self) -> SuperOp {
        SuperOp::from_kraus(&self.ops)
    }

    /// `Σ Aⱼ†Aⱼ`.
    pub fn gram(&self) -> Mat2 {
        self.ops
            .iter()
            .fold(Mat2::zeros(), |acc, a| acc + a.0.adjoint() * a.0)
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }
}

/// `Σ = plus − minus` with both parts completely positive.
#[derive(Clone, Debug, PartialEq)]
pub struct CpDifference {
    pub plus: KrausSet,
    pub minus: KrausSet,
}

impl CpDifference {
    pub fn superop(&self) -> SuperOp {
        self.plus.superop() - self.minus.superop()
    }
}

/// `Σ = (1+p)·Λ₊ − p·Λ₋` with both maps CPTP.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCptp {
    pub lambda_plus: SuperOp,
    pub lambda_minus: SuperOp,
    pub p: f64,
    /// `D = √(p·I − Σ M†M)`.
    pub d_op: QubitOperator,
}

impl WeightedCptp {
    pub fn reconstruct(&self) -> SuperOp {
        self.lambda_plus * (1.0 + self.p) - self.lambda_minus * self.p
    }

    /// Sampling overhead `1 + 2p`.
    pub fn overhead(&self) -> f64 {
        1.0 + 2.0 * self.p
    }
}

/// Kraus operator of the rank-one Choi term `v v†`: `A[a][i] = v[2i + a]`.
pub fn kraus_from_choi_vector(v: &Vector4<C64>) -> QubitOperator {
    QubitOperator(Mat2::new(v[0], v[2], v[1], v[3]))
}

/// Splits the Choi spectrum into positive and negative parts,
/// `C± = Σ max(0, ±λᵢ) vᵢvᵢ†`, and reads one Kraus operator off each
/// eigenvector.
pub fn split_cp(sigma: &SuperOp) -> Result<CpDifference> {
    let choi = choi_of_map(sigma);
    let eig = linalg::hermitian_eig(&choi.0)
        .map_err(|e| QmapError::invalid(format!("Choi matrix of the map: {e}")))?;
    let mut plus = KrausSet::default();
    let mut minus = KrausSet::default();
    for i in 0..4 {
        let l = eig.values[i];
        if l.abs() < tol::EIG_CUTOFF {
            continue;
        }
        let v: Vector4<C64> = eig.vectors.column(i).into_owned();
        let k = kraus_from_choi_vector(&(v * C64::from(l.abs().sqrt())));
        if l > 0.0 {
            plus.ops.push(k);
        } else {
            minus.ops.push(k);
        }
    }
    Ok(CpDifference { plus, minus })
}

/// Adds `DρD†` to both parts with the smallest `p` that makes the negative
/// part trace preserving after scaling.
pub fn balance(diff: &CpDifference) -> Result<WeightedCptp> {
    let represented = diff.superop();
    let defect = represented.trace_defect();
    if !(defect <= tol::INTEGRATION) {
        return Err(QmapError::invalid(format!(
            "map is not trace preserving (defect {defect:.3e})"
        )));
    }
    let plus = diff.plus.superop();
    if diff.minus.is_empty() {
        return Ok(WeightedCptp {
            lambda_plus: plus,
            lambda_minus: SuperOp::identity(),
            p: 0.0,
            d_op: QubitOperator::zero(),
        });
    }
    let gram = diff.minus.gram();
    let gram = (gram + gram.adjoint()) * C64::from(0.5);
    let p = linalg::hermitian_eig(&gram)?.max().max(0.0);
    if p == 0.0 {
        return Ok(WeightedCptp {
            lambda_plus: plus,
            lambda_minus: SuperOp::identity(),
            p: 0.0,
            d_op: QubitOperator::zero(),
        });
    }
    let d = QubitOperator(linalg::psd_sqrt(&(Mat2::identity() * C64::from(p) - gram))?);
    let dd = SuperOp::conjugation(&d);
    Ok(WeightedCptp {
        lambda_plus: (plus + dd) * (1.0 / (1.0 + p)),
        lambda_minus: (diff.minus.superop() + dd) * (1.0 / p),
        p,
        d_op: d,
    })
}
