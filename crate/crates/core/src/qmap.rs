// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Qubit operators, Bloch vectors, superoperators and Choi matrices.
//!
//! Operators are vectorized row-major, `vec(ρ)[2i+j] = ρᵢⱼ`, so the
//! superoperator of `ρ ↦ AρB` is `A ⊗ Bᵀ`. The Choi matrix puts the input
//! index on the first tensor factor: `C(Σ) = Σᵢⱼ eᵢⱼ ⊗ Σ(eᵢⱼ)`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{QmapError, Result};
use crate::linalg::{self, c, hermiticity_gap, max_abs, Mat2, Mat4, C64, I, ONE, ZERO};
use crate::tol;

/// A 2×2 complex matrix: a state, a pseudo-state, a Kraus or unitary operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitOperator(#[serde(with = "crate::serde_cplx::mat2")] pub Mat2);

/// Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl QubitOperator {
    pub fn new(m: Mat2) -> Self {
        QubitOperator(m)
    }

    pub fn from_rows(rows: [[C64; 2]; 2]) -> Self {
        QubitOperator(Mat2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
    }

    pub fn real(a: f64, b: f64, cc: f64, d: f64) -> Self {
        QubitOperator(Mat2::new(c(a, 0.), c(b, 0.), c(cc, 0.), c(d, 0.)))
    }

    pub fn identity() -> Self {
        QubitOperator(Mat2::identity())
    }

    pub fn zero() -> Self {
        QubitOperator(Mat2::zeros())
    }

    pub fn sigma_x() -> Self {
        Self::real(0., 1., 1., 0.)
    }

    pub fn sigma_y() -> Self {
        QubitOperator(Mat2::new(ZERO, -I, I, ZERO))
    }

    pub fn sigma_z() -> Self {
        Self::real(1., 0., 0., -1.)
    }

    pub fn pauli(axis: Axis) -> Self {
        match axis {
            Axis::X => Self::sigma_x(),
            Axis::Y => Self::sigma_y(),
            Axis::Z => Self::sigma_z(),
        }
    }

    /// σ₊ = (σx + iσy)/2 = |0⟩⟨1|, raising towards the σz = +1 state.
    pub fn sigma_plus() -> Self {
        Self::real(0., 1., 0., 0.)
    }

    /// σ₋ = (σx − iσy)/2 = |1⟩⟨0|.
    pub fn sigma_minus() -> Self {
        Self::real(0., 0., 1., 0.)
    }

    /// Elementary matrix `eᵢⱼ = |i⟩⟨j|`.
    pub fn elementary(i: usize, j: usize) -> Self {
        let mut m = Mat2::zeros();
        m[(i, j)] = ONE;
        QubitOperator(m)
    }

    /// Projector onto computational basis state `|k⟩`.
    pub fn basis_state(k: usize) -> Self {
        Self::elementary(k, k)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn dagger(&self) -> Self {
        QubitOperator(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        QubitOperator(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0[(0, 0)] + self.0[(1, 1)]
    }

    pub fn det(&self) -> C64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }

    pub fn hermiticity_gap(&self) -> f64 {
        hermiticity_gap(&self.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_gap() <= tol
    }

    pub fn unitarity_gap(&self) -> f64 {
        max_abs(&(self.0.adjoint() * self.0 - Mat2::identity()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_gap() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(self.0 - other.0))
    }

    /// Row-major vectorization.
    pub fn vec(&self) -> Vector4<C64> {
        Vector4::new(
            self.0[(0, 0)],
            self.0[(0, 1)],
            self.0[(1, 0)],
            self.0[(1, 1)],
        )
    }

    pub fn unvec(v: &Vector4<C64>) -> Self {
        QubitOperator(Mat2::new(v[0], v[1], v[2], v[3]))
    }

    /// `tr(Oρ)` for a Pauli observable, real part.
    pub fn expectation(&self, axis: Axis) -> f64 {
        (QubitOperator::pauli(axis).0 * self.0).trace().re
    }

    /// Population of `|0⟩`, the σz = +1 ("excited") level in this crate's convention.
    pub fn excited_population(&self) -> f64 {
        self.0[(0, 0)].re
    }

    /// Multiplies by a global phase so the first entry with non-negligible
    /// modulus is real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        for z in self.0.iter() {
            if z.norm() > 1e-12 {
                let phase = z.conj() / z.norm();
                return QubitOperator(self.0 * phase);
            }
        }
        *self
    }
}

impl Add for QubitOperator {
    type Output = QubitOperator;
    fn add(self, rhs: Self) -> Self {
        QubitOperator(self.0 + rhs.0)
    }
}

impl Sub for QubitOperator {
    type Output = QubitOperator;
    fn sub(self, rhs: Self) -> Self {
        QubitOperator(self.0 - rhs.0)
    }
}

impl Neg for QubitOperator {
    type Output = QubitOperator;
    fn neg(self) -> Self {
        QubitOperator(-self.0)
    }
}

impl Mul for QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: Self) -> Self {
        QubitOperator(self.0 * rhs.0)
    }
}

impl Mul<C64> for QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: C64) -> Self {
        QubitOperator(self.0 * rhs)
    }
}

impl Mul<f64> for QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: f64) -> Self {
        QubitOperator(self.0 * C64::from(rhs))
    }
}

/// Real 3-vector `w` with `ρ = ½(I + w·σ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector(pub Vector3<f64>);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector(Vector3::new(x, y, z))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_physical(&self) -> bool {
        self.norm() <= 1.0 + tol::CONSTRUCT
    }

    /// Radial projection onto the unit ball.
    pub fn clamped_to_ball(&self) -> Self {
        let n = self.norm();
        if n > 1.0 {
            BlochVector(self.0 / n)
        } else {
            *self
        }
    }
}

/// `wᵢ = tr(σᵢρ)`.
pub fn to_bloch(rho: &QubitOperator) -> Result<BlochVector> {
    let gap = rho.hermiticity_gap();
    if !(gap <= tol::ALGEBRAIC) {
        return Err(QmapError::invalid(format!(
            "operator is not Hermitian (gap {gap:.3e})"
        )));
    }
    Ok(BlochVector::new(
        rho.expectation(Axis::X),
        rho.expectation(Axis::Y),
        rho.expectation(Axis::Z),
    ))
}

/// `½(I + w·σ)`.
pub fn from_bloch(w: &BlochVector) -> QubitOperator {
    let [x, y, z] = [w.0[0], w.0[1], w.0[2]];
    QubitOperator(Mat2::new(
        c(0.5 * (1.0 + z), 0.0),
        c(0.5 * x, -0.5 * y),
        c(0.5 * x, 0.5 * y),
        c(0.5 * (1.0 - z), 0.0),
    ))
}

/// Linear map on qubit operators, stored as a 4×4 matrix on `vec(ρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SuperOp(#[serde(with = "crate::serde_cplx::mat4")] pub Mat4);

impl SuperOp {
    pub fn new(m: Mat4) -> Self {
        SuperOp(m)
    }

    pub fn identity() -> Self {
        SuperOp(Mat4::identity())
    }

    pub fn zero() -> Self {
        SuperOp(Mat4::zeros())
    }

    /// `ρ ↦ AρB`.
    pub fn sandwich(a: &QubitOperator, b: &QubitOperator) -> Self {
        SuperOp(linalg::kron(&a.0, &b.0.transpose()))
    }

    /// `ρ ↦ KρK†`.
    pub fn conjugation(k: &QubitOperator) -> Self {
        SuperOp::sandwich(k, &k.dagger())
    }

    /// `ρ ↦ Σ KρK†`.
    pub fn from_kraus<'a>(ops: impl IntoIterator<Item = &'a QubitOperator>) -> Self {
        ops.into_iter()
            .fold(SuperOp::zero(), |acc, k| acc + SuperOp::conjugation(k))
    }

    /// `ρ ↦ ρᵀ`.
    pub fn transpose_map() -> Self {
        let mut m = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m[(2 * j + i, 2 * i + j)] = ONE;
            }
        }
        SuperOp(m)
    }

    /// `ρ ↦ tr(ρ) I/2`.
    pub fn full_depolarization() -> Self {
        let mut m = Mat4::zeros();
        for r in [0, 3] {
            for k in [0, 3] {
                m[(r, k)] = c(0.5, 0.0);
            }
        }
        SuperOp(m)
    }

    /// `ρ ↦ (1−q)ρ + q tr(ρ) I/2`.
    pub fn depolarizing(q: f64) -> Self {
        SuperOp::identity() * (1.0 - q) + SuperOp::full_depolarization() * q
    }

    /// Amplitude damping towards `|0⟩` with Kraus pair `diag(1, √(1−γ))`, `√γ|0⟩⟨1|`.
    pub fn amplitude_damping(gamma: f64) -> Self {
        let k0 = QubitOperator::real(1.0, 0.0, 0.0, (1.0 - gamma).sqrt());
        let k1 = QubitOperator::real(0.0, gamma.sqrt(), 0.0, 0.0);
        SuperOp::from_kraus(&[k0, k1])
    }

    pub fn unitary(u: &QubitOperator) -> Self {
        SuperOp::conjugation(u)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn apply(&self, rho: &QubitOperator) -> QubitOperator {
        QubitOperator::unvec(&(self.0 * rho.vec()))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &SuperOp) -> SuperOp {
        SuperOp(self.0 * inner.0)
    }

    /// Hilbert–Schmidt adjoint.
    pub fn adjoint(&self) -> SuperOp {
        SuperOp(self.0.adjoint())
    }

    pub fn max_abs_diff(&self, other: &SuperOp) -> f64 {
        max_abs(&(self.0 - other.0))
    }

    /// Deviation of the trace functional row from `vec(I)ᵀ`.
    pub fn trace_defect(&self) -> f64 {
        let target = [1.0, 0.0, 0.0, 1.0];
        (0..4)
            .map(|k| (self.0[(0, k)] + self.0[(3, k)] - c(target[k], 0.0)).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_defect() <= tol
    }

    /// Largest `|Σ(X†) − Σ(X)†|` over elementary inputs.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let a = self.apply(&QubitOperator::elementary(j, i));
                let b = self.apply(&QubitOperator::elementary(i, j)).dagger();
                worst = worst.max(a.max_abs_diff(&b));
            }
        }
        worst
    }

    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Affine Bloch action `(t, T)` with `tᵢ = ½tr(σᵢΣ(I))`, `Tᵢⱼ = ½tr(σᵢΣ(σⱼ))`.
    pub fn pauli_transfer(&self) -> (Vector3<f64>, Matrix3<f64>) {
        let out_i = self.apply(&QubitOperator::identity());
        let t = Vector3::from_fn(|i, _| 0.5 * out_i.expectation(Axis::ALL[i]));
        let outs = Axis::ALL.map(|a| self.apply(&QubitOperator::pauli(a)));
        let m = Matrix3::from_fn(|i, j| 0.5 * outs[j].expectation(Axis::ALL[i]));
        (t, m)
    }

    /// Trace- and Hermiticity-preserving map with Bloch action `w ↦ t + Tw`.
    pub fn from_pauli_transfer(t: &Vector3<f64>, m: &Matrix3<f64>) -> SuperOp {
        let paulis = Axis::ALL.map(QubitOperator::pauli);
        let image = |coeffs: [f64; 3], id: f64| {
            let mut acc = QubitOperator::identity() * id;
            for (p, w) in paulis.iter().zip(coeffs) {
                acc = acc + *p * w;
            }
            acc
        };
        let img_id = image([t[0], t[1], t[2]], 1.0);
        let img_p: Vec<QubitOperator> = (0..3)
            .map(|j| image([m[(0, j)], m[(1, j)], m[(2, j)]], 0.0))
            .collect();
        // e00 = (I+Z)/2, e11 = (I−Z)/2, e01 = (X+iY)/2, e10 = (X−iY)/2
        let half = 0.5;
        let e00 = (img_id + img_p[2]) * half;
        let e11 = (img_id - img_p[2]) * half;
        let e01 = (img_p[0] + img_p[1] * I) * half;
        let e10 = (img_p[0] - img_p[1] * I) * half;
        let cols = [e00.vec(), e01.vec(), e10.vec(), e11.vec()];
        SuperOp(Mat4::from_fn(|r, k| cols[k][r]))
    }
}

impl Add for SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: Self) -> Self {
        SuperOp(self.0 + rhs.0)
    }
}

impl Sub for SuperOp {
    type Output = SuperOp;
    fn sub(self, rhs: Self) -> Self {
        SuperOp(self.0 - rhs.0)
    }
}

impl Mul<f64> for SuperOp {
    type Output = SuperOp;
    fn mul(self, rhs: f64) -> Self {
        SuperOp(self.0 * C64::from(rhs))
    }
}

impl Mul<C64> for SuperOp {
    type Output = SuperOp;
    fn mul(self, rhs: C64) -> Self {
        SuperOp(self.0 * rhs)
    }
}

/// Choi matrix `Σᵢⱼ eᵢⱼ ⊗ Σ(eᵢⱼ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiMatrix(pub Mat4);

impl ChoiMatrix {
    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// Partial trace over the output factor; equals `I` for trace-preserving maps.
    pub fn input_marginal(&self) -> Mat2 {
        Mat2::from_fn(|i, j| self.0[(2 * i, 2 * j)] + self.0[(2 * i + 1, 2 * j + 1)])
    }
}

/// `C[2i+a][2j+b] = Σ(eᵢⱼ)ₐᵦ = S[2a+b][2i+j]`.
pub fn choi_of_map(s: &SuperOp) -> ChoiMatrix {
    ChoiMatrix(Mat4::from_fn(|r, k| {
        let (i, a) = (r / 2, r % 2);
        let (j, b) = (k / 2, k % 2);
        s.0[(2 * a + b, 2 * i + j)]
    }))
}

/// `Σ(ρ) = tr₁(C (ρᵀ ⊗ I))`; the exact inverse of [`choi_of_map`].
pub fn map_of_choi(cm: &ChoiMatrix) -> SuperOp {
    SuperOp(Mat4::from_fn(|r, k| {
        let (a, b) = (r / 2, r % 2);
        let (i, j) = (k / 2, k % 2);
        cm.0[(2 * i + a, 2 * j + b)]
    }))
}

/// Minimum eigenvalue of the Choi matrix; `≥ −1e-10` certifies complete positivity.
pub fn cp_defect(s: &SuperOp) -> Result<f64> {
    let choi = choi_of_map(s);
    Ok(linalg::hermitian_eig(&choi.0)?.min())
}

/// Qubit fidelity `tr(ρσ) + 2√(det ρ · det σ)`.
pub fn fidelity(rho: &QubitOperator, sigma: &QubitOperator) -> Result<f64> {
    for (name, op) in [("rho", rho), ("sigma", sigma)] {
        let eig = linalg::hermitian_eig(&op.0)
            .map_err(|_| QmapError::invalid(format!("{name} is not Hermitian")))?;
        if eig.min() < -tol::POSITIVITY {
            return Err(QmapError::invalid(format!(
                "{name} has negative eigenvalue {:.3e}; fidelity is undefined",
                eig.min()
            )));
        }
        if (op.trace().re - 1.0).abs() > tol::ALGEBRAIC {
            return Err(QmapError::invalid(format!(
                "{name} does not have unit trace"
            )));
        }
    }
    let overlap = (rho.0 * sigma.0).trace().re;
    let dets = rho.det().re.max(0.0) * sigma.det().re.max(0.0);
    Ok((overlap + 2.0 * dets.sqrt()).clamp(0.0, 1.0))
}
