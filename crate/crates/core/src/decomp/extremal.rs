// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Qubit channels as even mixtures of two extremal channels.
//!
//! Every extremal channel is written `ρ ↦ U(F₀VρV†F₀† + F₁VρV†F₁†)U†` with
//!
//! ```text
//! F₀ = [cos((μ−ν)/2)        0       ]   F₁ = [      0        cos((μ+ν)/2)]
//!      [      0        sin((μ+ν)/2) ]        [sin((μ−ν)/2)         0     ]
//! ```
//!
//! whose Bloch action is diagonal with `λ = (sin μ, sin ν, sin μ sin ν)` and
//! translation `(0, 0, cos μ cos ν)`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{QmapError, Result};
use crate::linalg::{self, c, Mat2, Mat4, C64};
use crate::qmap::{choi_of_map, cp_defect, map_of_choi, ChoiMatrix, QubitOperator, SuperOp};
use crate::tol;

/// Tolerance on the CPTP pre-condition of the channel routines.
const CPTP_TOL: f64 = 1e-9;
/// Choi eigenvalues below this count as absent when testing for rank ≤ 2.
const RANK_CUTOFF: f64 = 1e-11;
/// Pseudo-inverse cutoff for `√A` and `√(I−A)`.
const PINV_CUTOFF: f64 = 1e-13;
/// Singular values closer than this are treated as one degenerate block.
const CLUSTER_TOL: f64 = 1e-10;
/// Accepted mismatch between a channel and its extremal parameterization.
const FIT_TOL: f64 = 1e-8;

/// `(F₀, F₁)` for angles `(μ, ν)`.
pub fn kraus_of_extremal(mu: f64, nu: f64) -> (QubitOperator, QubitOperator) {
    let a = 0.5 * (mu - nu);
    let b = 0.5 * (mu + nu);
    let f0 = QubitOperator::real(a.cos(), 0.0, 0.0, b.sin());
    let f1 = QubitOperator::real(0.0, b.cos(), a.sin(), 0.0);
    (f0, f1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalChannel {
    pub u_post: QubitOperator,
    pub v_pre: QubitOperator,
    pub mu: f64,
    pub nu: f64,
}

impl ExtremalChannel {
    pub fn new(u_post: QubitOperator, v_pre: QubitOperator, mu: f64, nu: f64) -> Self {
        ExtremalChannel {
            u_post,
            v_pre,
            mu,
            nu,
        }
    }

    /// The two Kraus operators `U Fₖ V`.
    pub fn kraus(&self) -> [QubitOperator; 2] {
        let (f0, f1) = kraus_of_extremal(self.mu, self.nu);
        [self.u_post * f0 * self.v_pre, self.u_post * f1 * self.v_pre]
    }

    pub fn superop(&self) -> SuperOp {
        SuperOp::from_kraus(&self.kraus())
    }

    /// Finds `(U, V, μ, ν)` for a channel whose Choi rank is at most two.
    pub fn from_channel(channel: &SuperOp) -> Result<ExtremalChannel> {
        let (t, m) = channel.pauli_transfer();
        let frame = diagonal_frame(&t, &m);
        let fit = canonical_extremal(&frame);
        let ext = ExtremalChannel {
            u_post: rotation_to_su2(&fit.post)?,
            v_pre: rotation_to_su2(&fit.pre)?,
            mu: fit.mu,
            nu: fit.nu,
        };
        let err = ext.superop().max_abs_diff(channel);
        if !(err <= FIT_TOL) {
            return Err(QmapError::Numerical(format!(
                "channel is not extremal: best (μ, ν) fit misses by {err:.3e}"
            )));
        }
        Ok(ext)
    }
}

/// Bloch-rotation data of a channel in diagonal form,
/// `Λ(ρ) = U Λ_D(VρV†) U†`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalForm {
    pub u_post: QubitOperator,
    pub v_pre: QubitOperator,
    /// Translation of `Λ_D`.
    pub t_vec: Vector3<f64>,
    /// Diagonal of `Λ_D`'s transfer matrix; signs are kept so both rotations are proper.
    pub lambda_vec: Vector3<f64>,
}

/// Rotations and diagonal with `T = post · diag(d) · pre`, `t = post · t'`.
#[derive(Clone, Copy, Debug)]
struct Frame {
    post: Matrix3<f64>,
    pre: Matrix3<f64>,
    d: Vector3<f64>,
    t: Vector3<f64>,
}

fn householder_to_e1(y: &[f64]) -> Vec<Vec<f64>> {
    let k = y.len();
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut q = vec![vec![0.0; k]; k];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if norm < 1e-300 {
        return q;
    }
    let mut v: Vec<f64> = y.iter().map(|x| x / norm).collect();
    v[0] -= 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    if vv < 1e-30 {
        return q;
    }
    for i in 0..k {
        for j in 0..k {
            q[i][j] -= 2.0 * v[i] * v[j] / vv;
        }
    }
    q
}

fn diagonal_frame(t: &Vector3<f64>, m: &Matrix3<f64>) -> Frame {
    let svd = m.svd(true, true);
    let mut u = svd.u.expect("requested U");
    let mut w = svd.v_t.expect("requested Vᵀ").transpose();
    let mut s = svd.singular_values;

    // Inside a degenerate block the singular basis is free; turn it so the
    // translation has a single component there.
    let mut i = 0;
    while i < 3 {
        let mut j = i + 1;
        while j < 3 && (s[j] - s[i]).abs() <= CLUSTER_TOL {
            j += 1;
        }
        if j - i >= 2 {
            let idx: Vec<usize> = (i..j).collect();
            let tp = u.transpose() * t;
            let y: Vec<f64> = idx.iter().map(|&k| tp[k]).collect();
            let h = householder_to_e1(&y);
            let rotate = |mat: &mut Matrix3<f64>| {
                let old = *mat;
                for r in 0..3 {
                    for (a, &ka) in idx.iter().enumerate() {
                        let mut acc = 0.0;
                        for (b, &kb) in idx.iter().enumerate() {
                            acc += old[(r, kb)] * h[b][a];
                        }
                        mat[(r, ka)] = acc;
                    }
                }
            };
            rotate(&mut u);
            rotate(&mut w);
        }
        i = j;
    }

    if u.determinant() < 0.0 {
        u = -u;
        s = -s;
    }
    if w.determinant() < 0.0 {
        w = -w;
        s = -s;
    }
    Frame {
        post: u,
        pre: w.transpose(),
        d: s,
        t: u.transpose() * t,
    }
}

/// Bloch rotations to SU(2) plus the diagonal data of a CPTP channel.
pub fn diagonal_form(channel: &SuperOp) -> Result<DiagonalForm> {
    check_cptp(channel)?;
    let (t, m) = channel.pauli_transfer();
    let f = diagonal_frame(&t, &m);
    Ok(DiagonalForm {
        u_post: rotation_to_su2(&f.post)?,
        v_pre: rotation_to_su2(&f.pre)?,
        t_vec: f.t,
        lambda_vec: f.d,
    })
}

fn check_cptp(channel: &SuperOp) -> Result<()> {
    let tp = channel.trace_defect();
    let hp = channel.hermiticity_defect();
    if !(tp <= CPTP_TOL && hp <= CPTP_TOL) {
        return Err(QmapError::invalid(format!(
            "map is not trace/Hermiticity preserving (defects {tp:.3e}, {hp:.3e})"
        )));
    }
    let cp = cp_defect(channel)?;
    if cp < -CPTP_TOL {
        return Err(QmapError::invalid(format!(
            "map is not completely positive (min Choi eigenvalue {cp:.3e})"
        )));
    }
    Ok(())
}

/// `exp(−iθ n̂·σ/2)` for the Bloch rotation `r`, with its global phase fixed
/// so the first non-negligible entry is real positive.
pub fn rotation_to_su2(r: &Matrix3<f64>) -> Result<QubitOperator> {
    let orth = (r.transpose() * r - Matrix3::identity()).abs().max();
    let det = r.determinant();
    if !(orth <= tol::ALGEBRAIC && (det - 1.0).abs() <= tol::ALGEBRAIC) {
        return Err(QmapError::invalid(format!(
            "not a rotation (‖RᵀR − I‖ = {orth:.3e}, det = {det:.6})"
        )));
    }
    let anti = Vector3::new(
        r[(2, 1)] - r[(1, 2)],
        r[(0, 2)] - r[(2, 0)],
        r[(1, 0)] - r[(0, 1)],
    );
    let cos_t = (0.5 * (r.trace() - 1.0)).clamp(-1.0, 1.0);
    let sin_t = 0.5 * anti.norm();
    let theta = sin_t.atan2(cos_t);

    let axis = if theta.abs() < 1e-15 {
        Vector3::z()
    } else if cos_t > 0.0 {
        anti / anti.norm()
    } else {
        // (R + Rᵀ)/2 = cosθ·I + (1 − cosθ)·n̂n̂ᵀ
        let sym = (r + r.transpose()) * 0.5;
        let nn = (sym - Matrix3::identity() * cos_t) / (1.0 - cos_t);
        let mut k = 0;
        for i in 1..3 {
            if nn[(i, i)] > nn[(k, k)] {
                k = i;
            }
        }
        let mut n: Vector3<f64> = nn.column(k).into_owned();
        n /= n.norm();
        if n.dot(&anti) < 0.0 {
            n = -n;
        }
        n
    };

    let (s, co) = (0.5 * theta).sin_cos();
    let u = Mat2::new(
        c(co, -s * axis[2]),
        c(-s * axis[1], -s * axis[0]),
        c(s * axis[1], -s * axis[0]),
        c(co, s * axis[2]),
    );
    Ok(QubitOperator(u).with_canonical_phase())
}

/// Result of fitting `(μ, ν)` and rotations to a diagonal frame.
#[derive(Clone, Copy, Debug)]
struct ExtremalFit {
    post: Matrix3<f64>,
    pre: Matrix3<f64>,
    mu: f64,
    nu: f64,
}

fn proper_signed_permutations() -> Vec<Matrix3<f64>> {
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut out = Vec::with_capacity(24);
    for p in perms {
        for signs in 0..8u8 {
            let mut m = Matrix3::zeros();
            for (i, &pi) in p.iter().enumerate() {
                m[(i, pi)] = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
            }
            if m.determinant() > 0.0 {
                out.push(m);
            }
        }
    }
    out
}

fn proper_sign_flips() -> [Matrix3<f64>; 4] {
    [
        Matrix3::identity(),
        Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0)),
        Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, -1.0)),
        Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0)),
    ]
}

/// Angles from `(λ₁, λ₂, λ₃, t₃)` through the half-angles `a = (μ−ν)/2`,
/// `b = (μ+ν)/2`, whose squared sines and cosines are affine in the data.
fn angles_from_diagonal(l: &Vector3<f64>, t3: f64) -> (f64, f64) {
    let half = |x: f64| (0.5 * x).clamp(0.0, 1.0).sqrt();
    let ca = half(1.0 + t3 + l[2]);
    let sa = half(1.0 - t3 - l[2]).copysign(l[0] - l[1]);
    let cb = half(1.0 + t3 - l[2]);
    let sb = half(1.0 - t3 + l[2]).copysign(l[0] + l[1]);
    let a = sa.atan2(ca);
    let b = sb.atan2(cb);
    (a + b, b - a)
}

fn canonical_extremal(frame: &Frame) -> ExtremalFit {
    let mut best: Option<(f64, f64, ExtremalFit)> = None;
    for a in proper_signed_permutations() {
        for s in proper_sign_flips() {
            let dm = a.transpose() * Matrix3::from_diagonal(&frame.d) * a * s;
            let l = dm.diagonal();
            let t = a.transpose() * frame.t;
            let (mu, nu) = angles_from_diagonal(&l, t[2]);
            let resid = [
                l[0] - mu.sin(),
                l[1] - nu.sin(),
                l[2] - mu.sin() * nu.sin(),
                t[0],
                t[1],
                t[2] - mu.cos() * nu.cos(),
            ]
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
            let post = frame.post * a;
            let pre = s * a.transpose() * frame.pre;
            let closeness = post.trace() + pre.trace();
            let fit = ExtremalFit { post, pre, mu, nu };
            best = match best {
                None => Some((resid, closeness, fit)),
                Some((r0, c0, f0)) => {
                    if resid < r0 - 1e-12 || (resid <= r0 + 1e-12 && closeness > c0 + 1e-12) {
                        Some((resid, closeness, fit))
                    } else {
                        Some((r0, c0, f0))
                    }
                }
            };
        }
    }
    best.expect("candidate set is non-empty").2
}

/// The `A`, `C` blocks of the adjoint channel's Choi matrix,
/// `C(Φ̂) = [[A, C], [C†, I − A]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjointChoiBlocks {
    pub a: QubitOperator,
    pub c: QubitOperator,
}

impl AdjointChoiBlocks {
    pub fn of_channel(channel: &SuperOp) -> AdjointChoiBlocks {
        let choi = choi_of_map(&channel.adjoint());
        let a = Mat2::from_fn(|r, k| choi.0[(r, k)]);
        let cb = Mat2::from_fn(|r, k| choi.0[(r, k + 2)]);
        let a = (a + a.adjoint()) * C64::from(0.5);
        AdjointChoiBlocks {
            a: QubitOperator(a),
            c: QubitOperator(cb),
        }
    }

    /// `R = √A⁺ C √(I−A)⁺`, a contraction when the channel is CP.
    pub fn contraction(&self) -> Result<Mat2> {
        let comp = Mat2::identity() - self.a.0;
        let ra = linalg::psd_pinv_sqrt(&self.a.0, PINV_CUTOFF)?;
        let rb = linalg::psd_pinv_sqrt(&comp, PINV_CUTOFF)?;
        Ok(ra * self.c.0 * rb)
    }

    /// Adjoint Choi matrix of the generalized extreme point with unitary `u`.
    fn extreme_choi(&self, u: &Mat2) -> Result<ChoiMatrix> {
        let sa = linalg::psd_sqrt(&self.a.0)?;
        let sb = linalg::psd_sqrt(&(Mat2::identity() - self.a.0))?;
        let off = sa * u * sb;
        let comp = Mat2::identity() - self.a.0;
        Ok(ChoiMatrix(Mat4::from_fn(|r, k| match (r < 2, k < 2) {
            (true, true) => self.a.0[(r, k)],
            (true, false) => off[(r, k - 2)],
            (false, true) => off.adjoint()[(r - 2, k)],
            (false, false) => comp[(r - 2, k - 2)],
        })))
    }
}

/// Writes a CPTP map as `½Λ₁ + ½Λ₂` with both parts extremal.
pub fn extremal_split(channel: &SuperOp) -> Result<(ExtremalChannel, ExtremalChannel)> {
    check_cptp(channel)?;

    let eig = linalg::hermitian_eig(&choi_of_map(channel).0)?;
    if eig.values[2] <= RANK_CUTOFF {
        let ext = ExtremalChannel::from_channel(channel)?;
        return Ok((ext, ext));
    }

    let blocks = AdjointChoiBlocks::of_channel(channel);
    let r = blocks.contraction()?;
    let svd = r.svd(true, true);
    let v = svd.u.expect("requested U");
    let w_dag = svd.v_t.expect("requested V†");
    let theta = svd.singular_values.map(|s| s.clamp(0.0, 1.0).acos());
    let phases = |sign: f64| {
        Matrix2::from_diagonal(&nalgebra::Vector2::new(
            C64::from_polar(1.0, sign * theta[0]),
            C64::from_polar(1.0, sign * theta[1]),
        ))
    };
    let u1 = v * phases(1.0) * w_dag;
    let u2 = v * phases(-1.0) * w_dag;

    let mut parts = Vec::with_capacity(2);
    for u in [u1, u2] {
        let adj = map_of_choi(&blocks.extreme_choi(&u)?);
        parts.push(ExtremalChannel::from_channel(&adj.adjoint())?);
    }
    Ok((parts[0], parts[1]))
}

/// Bloch rotation of `ρ ↦ UρU†`.
pub fn su2_to_rotation(u: &QubitOperator) -> Matrix3<f64> {
    let (_, m) = SuperOp::unitary(u).pauli_transfer();
    m
}

/// Rotation by `angle` about the unit axis `n`.
pub fn axis_angle(n: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(*n), angle).into_inner()
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}
