// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time-local master equations with signed rates.
//!
//! The generator is
//!
//! ```text
//! L_t(ρ) = s · ( −i[H, ρ] + Σₖ Γₖ(t) (LₖρLₖ† − ½{Lₖ†Lₖ, ρ}) )
//! ```
//!
//! where `s = ±1` selects forward or time-reversed evolution. Rates may be
//! negative, in which case propagators between intermediate times need not
//! be completely positive.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{QmapError, Result};
use crate::linalg::{kron, Mat2, Mat4, C64, I};
use crate::qmap::{QubitOperator, SuperOp};
use crate::tol;

/// Default RK4 step in time units.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum RateFunction {
    Constant {
        value: f64,
    },
    /// `a·exp(−t)·(b − sin²(cπt)) − d`
    Fig3 {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
}

impl RateFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            RateFunction::Constant { value } => value,
            RateFunction::Fig3 { a, b, c, d } => {
                let s = (c * PI * t).sin();
                a * (-t).exp() * (b - s * s) - d
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Direction {
    Forward,
    Reversed,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Reversed => -1.0,
        }
    }
}

impl TryFrom<i8> for Direction {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Direction::Forward),
            -1 => Ok(Direction::Reversed),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Direction> for i8 {
    fn from(d: Direction) -> i8 {
        match d {
            Direction::Forward => 1,
            Direction::Reversed => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayChannel {
    pub jump: QubitOperator,
    pub rate: RateFunction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub hamiltonian: QubitOperator,
    pub channels: Vec<DecayChannel>,
    pub sign: Direction,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let gap = self.hamiltonian.hermiticity_gap();
        if !(gap <= tol::CONSTRUCT) {
            return Err(QmapError::invalid(format!(
                "Hamiltonian is not Hermitian (gap {gap:.3e})"
            )));
        }
        Ok(())
    }

    pub fn reversed(&self) -> GeneratorSpec {
        let sign = match self.sign {
            Direction::Forward => Direction::Reversed,
            Direction::Reversed => Direction::Forward,
        };
        GeneratorSpec {
            sign,
            ..self.clone()
        }
    }

    pub fn rates_at(&self, t: f64) -> Vec<f64> {
        self.channels.iter().map(|ch| ch.rate.eval(t)).collect()
    }
}

/// Dissipator superoperator `LρL† − ½{L†L, ρ}`.
fn dissipator(l: &Mat2) -> Mat4 {
    let ldl = l.adjoint() * l;
    let id = Mat2::identity();
    let half = C64::from(0.5);
    kron(l, &l.conjugate()) - kron(&ldl, &id) * half - kron(&id, &ldl.transpose()) * half
}

pub fn generator_at(spec: &GeneratorSpec, t: f64) -> SuperOp {
    let h = &spec.hamiltonian.0;
    let id = Mat2::identity();
    let mut m = (kron(h, &id) - kron(&id, &h.transpose())) * (-I);
    for ch in &spec.channels {
        let g = ch.rate.eval(t);
        if g != 0.0 {
            m += dissipator(&ch.jump.0) * C64::from(g);
        }
    }
    SuperOp(m * C64::from(spec.sign.sign()))
}

/// Time-ordered propagator `Λ_{t_end, t_start}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    pub map: SuperOp,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

/// `ceil((t − s)/DEFAULT_STEP)`, at least one.
pub fn default_steps(s: f64, t: f64) -> usize {
    let n = ((t - s) / DEFAULT_STEP - 1e-9).ceil();
    if n < 1.0 {
        1
    } else {
        n as usize
    }
}

/// Integrates `dΛ/du = L_u Λ`, `Λ(s) = I` with fixed-step classical RK4.
pub fn propagate(spec: &GeneratorSpec, s: f64, t: f64, steps: usize) -> Result<Propagator> {
    if !(s >= 0.0 && t >= s) {
        return Err(QmapError::invalid(format!(
            "propagation needs 0 ≤ s ≤ t, got s={s}, t={t}"
        )));
    }
    if steps == 0 {
        return Err(QmapError::invalid("steps must be positive"));
    }
    let mut lam = Matrix4::<C64>::identity();
    if t > s {
        let h = (t - s) / steps as f64;
        let hc = C64::from(h);
        let half = C64::from(0.5 * h);
        for k in 0..steps {
            let u = s + k as f64 * h;
            let l0 = generator_at(spec, u).0;
            let lm = generator_at(spec, u + 0.5 * h).0;
            let l1 = generator_at(spec, u + h).0;
            let k1 = l0 * lam;
            let k2 = lm * (lam + k1 * half);
            let k3 = lm * (lam + k2 * half);
            let k4 = l1 * (lam + k3 * hc);
            lam += (k1 + (k2 + k3) * C64::from(2.0) + k4) * (hc / 6.0);
        }
    }
    Ok(Propagator {
        map: SuperOp(lam),
        t_start: s,
        t_end: t,
        steps,
    })
}

/// [`propagate`] with the default step count.
pub fn propagate_default(spec: &GeneratorSpec, s: f64, t: f64) -> Result<Propagator> {
    propagate(spec, s, t, default_steps(s, t))
}

/// Qubit coupled to a thermal bath: `H = ωσz/2`, decay `σ₋` at `γe^{βω}`,
/// excitation `σ₊` at `γ`.
pub fn thermal_spec(beta: f64, omega: f64, gamma: f64, sign: Direction) -> GeneratorSpec {
    GeneratorSpec {
        hamiltonian: QubitOperator::sigma_z() * (0.5 * omega),
        channels: vec![
            DecayChannel {
                jump: QubitOperator::sigma_minus(),
                rate: RateFunction::Constant {
                    value: gamma * (beta * omega).exp(),
                },
            },
            DecayChannel {
                jump: QubitOperator::sigma_plus(),
                rate: RateFunction::Constant { value: gamma },
            },
        ],
        sign,
    }
}

/// Parameters `(a, b, c, d)` of the four oscillating rates, in channel order
/// σ₋, σ₊, τ₋, τ₊.
pub const FIG3_PARAMS: [(f64, f64, f64, f64); 4] = [
    (3.0, 4.5, 2.0, 2.6),
    (1.0, 3.5, 2.0, 2.6),
    (1.0, 1.0, 2.3, 0.4),
    (1.5, 1.5, 2.2, 0.4),
];

/// τ₊ = ½(σz − iσy): raising between σx eigenstates, |−⟩ → |+⟩.
pub fn tau_plus() -> QubitOperator {
    (QubitOperator::sigma_z() - QubitOperator::sigma_y() * I) * 0.5
}

/// τ₋ = ½(σz + iσy) = τ₊†.
pub fn tau_minus() -> QubitOperator {
    (QubitOperator::sigma_z() + QubitOperator::sigma_y() * I) * 0.5
}

/// Four-channel non-Markovian model with oscillating, partly negative rates.
pub fn fig3_spec() -> GeneratorSpec {
    let jumps = [
        QubitOperator::sigma_minus(),
        QubitOperator::sigma_plus(),
        tau_minus(),
        tau_plus(),
    ];
    let channels = jumps
        .into_iter()
        .zip(FIG3_PARAMS)
        .map(|(jump, (a, b, c, d))| DecayChannel {
            jump,
            rate: RateFunction::Fig3 { a, b, c, d },
        })
        .collect();
    GeneratorSpec {
        hamiltonian: QubitOperator::zero(),
        channels,
        sign: Direction::Forward,
    }
}

/// Maximal runs of grid points at which every rate is strictly negative,
/// reported as `(first, last)` grid times.
pub fn all_negative_window(spec: &GeneratorSpec, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(QmapError::invalid("time grid must be strictly increasing"));
    }
    if spec.channels.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut last = 0.0;
    for &t in grid {
        let neg = spec.channels.iter().all(|ch| ch.rate.eval(t) < 0.0);
        match (neg, start) {
            (true, None) => start = Some(t),
            (false, Some(s0)) => {
                out.push((s0, last));
                start = None;
            }
            _ => {}
        }
        last = t;
    }
    if let Some(s0) = start {
        out.push((s0, last));
    }
    Ok(out)
}

fn norm1(m: &Mat4) -> f64 {
    (0..4)
        .map(|k| (0..4).map(|r| m[(r, k)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse by Gauss–Jordan elimination with full pivoting.
pub fn invert_map(s: &SuperOp) -> Result<SuperOp> {
    let a0 = s.0;
    let scale = norm1(&a0);
    if scale == 0.0 {
        return Err(QmapError::Singular {
            condition: f64::INFINITY,
        });
    }
    let mut a = a0;
    let mut inv = Mat4::identity();
    let mut col_perm = [0usize, 1, 2, 3];

    for k in 0..4 {
        let (mut pr, mut pc, mut best) = (k, k, -1.0);
        for r in k..4 {
            for c in k..4 {
                let v = a[(r, c)].norm();
                if v > best {
                    best = v;
                    pr = r;
                    pc = c;
                }
            }
        }
        if best <= f64::EPSILON * scale {
            return Err(QmapError::Singular {
                condition: f64::INFINITY,
            });
        }
        a.swap_rows(k, pr);
        inv.swap_rows(k, pr);
        a.swap_columns(k, pc);
        col_perm.swap(k, pc);

        let piv = a[(k, k)];
        for c in 0..4 {
            a[(k, c)] /= piv;
            inv[(k, c)] /= piv;
        }
        for r in 0..4 {
            if r != k {
                let f = a[(r, k)];
                if f.norm() != 0.0 {
                    for c in 0..4 {
                        let akc = a[(k, c)];
                        let ikc = inv[(k, c)];
                        a[(r, c)] -= f * akc;
                        inv[(r, c)] -= f * ikc;
                    }
                }
            }
        }
    }
    // Column swaps of A permute the rows of A⁻¹.
    let mut out = Mat4::zeros();
    for (k, &orig) in col_perm.iter().enumerate() {
        for c in 0..4 {
            out[(orig, c)] = inv[(k, c)];
        }
    }
    let condition = scale * norm1(&out);
    if !(condition <= tol::MAX_CONDITION) {
        return Err(QmapError::Singular { condition });
    }
    Ok(SuperOp(out))
}
