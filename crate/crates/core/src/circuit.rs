// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Two-wire circuits: synthesis for extremal channels, exact simulation and
//! a line-based text format.
//!
//! Wire 0 is the system and wire 1 the ancilla. Basis index `2s + a`, so the
//! system is the high bit. The ancilla starts in `|0⟩`.
//!
//! Text format, one gate per line:
//!
//! ```text
//! unitary 0 <re00> <im00> <re01> <im01> <re10> <im10> <re11> <im11>
//! ry 1 0.927295218002
//! cnot 0 1
//! measure 1
//! ```

use std::fmt::Write as _;

use nalgebra::Vector4;
use rand::Rng;

use crate::decomp::{kraus_of_extremal, ExtremalChannel};
use crate::error::{QmapError, Result};
use crate::linalg::{self, c, Mat2, Mat4, C64};
use crate::qmap::{QubitOperator, SuperOp};
use crate::tol;

pub const SYSTEM: usize = 0;
pub const ANCILLA: usize = 1;
/// Significant digits of every number in the text format.
pub const TEXT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Unitary1q {
        matrix: QubitOperator,
        wire: usize,
    },
    /// `exp(−iθσy/2)`.
    Ry {
        theta: f64,
        wire: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Measure {
        wire: usize,
    },
}

impl Gate {
    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::Unitary1q { wire, .. } | Gate::Ry { wire, .. } | Gate::Measure { wire } => {
                vec![wire]
            }
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    /// Full 4×4 unitary; `None` for measurements.
    fn unitary(&self) -> Option<Mat4> {
        let lift = |u: &Mat2, wire: usize| {
            if wire == SYSTEM {
                linalg::kron(u, &Mat2::identity())
            } else {
                linalg::kron(&Mat2::identity(), u)
            }
        };
        match *self {
            Gate::Unitary1q { matrix, wire } => Some(lift(&matrix.0, wire)),
            Gate::Ry { theta, wire } => Some(lift(&ry(theta).0, wire)),
            Gate::Cnot { control, target } => {
                let mut m = Mat4::zeros();
                for idx in 0..4 {
                    let bit = |w: usize| (idx >> (1 - w)) & 1;
                    let out = if bit(control) == 1 {
                        idx ^ (1 << (1 - target))
                    } else {
                        idx
                    };
                    m[(out, idx)] = linalg::ONE;
                }
                Some(m)
            }
            Gate::Measure { .. } => None,
        }
    }
}

/// `exp(−iθσy/2)`.
pub fn ry(theta: f64) -> QubitOperator {
    let (s, co) = (0.5 * theta).sin_cos();
    QubitOperator::real(co, -s, s, co)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>) -> Result<Circuit> {
        let circuit = Circuit { gates };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn empty() -> Circuit {
        Circuit::default()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    /// Appends `other` after `self`; `self` must not measure any wire.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Circuit::new(gates)
    }

    pub fn measures(&self, wire: usize) -> bool {
        self.gates
            .iter()
            .any(|g| matches!(g, Gate::Measure { wire: w } if *w == wire))
    }

    pub fn validate(&self) -> Result<()> {
        let mut measured = [false; 2];
        for (i, g) in self.gates.iter().enumerate() {
            let wires = g.wires();
            if wires.iter().any(|&w| w > 1) {
                return Err(QmapError::Structural(format!(
                    "gate {i}: wire index out of range"
                )));
            }
            if wires.iter().any(|&w| measured[w]) {
                return Err(QmapError::Structural(format!(
                    "gate {i}: acts on a wire after its measurement"
                )));
            }
            match *g {
                Gate::Unitary1q { matrix, .. } => {
                    let gap = matrix.unitarity_gap();
                    if !(gap <= tol::ALGEBRAIC) {
                        return Err(QmapError::Structural(format!(
                            "gate {i}: matrix is not unitary (gap {gap:.3e})"
                        )));
                    }
                }
                Gate::Ry { theta, .. } if !theta.is_finite() => {
                    return Err(QmapError::Structural(format!("gate {i}: non-finite angle")));
                }
                Gate::Cnot { control, target } if control == target => {
                    return Err(QmapError::Structural(format!(
                        "gate {i}: cnot control equals target"
                    )));
                }
                Gate::Measure { wire } => measured[wire] = true,
                _ => {}
            }
        }
        Ok(())
    }

    /// Product of all unitary gates, first gate rightmost.
    pub fn unitary(&self) -> Mat4 {
        let mut cols = Mat4::zeros();
        for k in 0..4 {
            let mut sv = StateVector::basis(k);
            for g in &self.gates {
                sv.apply(g);
            }
            cols.set_column(k, &sv.amplitudes);
        }
        cols
    }

    /// Kraus operator for ancilla outcome `a`: `K[s'][s] = ⟨s' a|W|s 0⟩`.
    fn ancilla_kraus(&self, a: usize) -> QubitOperator {
        let w = self.unitary();
        QubitOperator(Mat2::from_fn(|so, si| w[(2 * so + a, 2 * si)]))
    }

    /// Unnormalized system maps for ancilla outcomes 0 and 1. Without an
    /// ancilla measurement the ancilla is traced out and reported as outcome 0.
    pub fn conditional_maps(&self) -> [SuperOp; 2] {
        let dephase = |m: SuperOp| {
            if self.measures(SYSTEM) {
                let p0 = QubitOperator::basis_state(0);
                let p1 = QubitOperator::basis_state(1);
                SuperOp::from_kraus(&[p0, p1]).compose(&m)
            } else {
                m
            }
        };
        let m0 = SuperOp::conjugation(&self.ancilla_kraus(0));
        let m1 = SuperOp::conjugation(&self.ancilla_kraus(1));
        if self.measures(ANCILLA) {
            [dephase(m0), dephase(m1)]
        } else {
            [dephase(m0 + m1), SuperOp::zero()]
        }
    }
}

/// Two-qubit pure state, system ⊗ ancilla.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vector4<C64>,
}

impl StateVector {
    pub fn basis(k: usize) -> StateVector {
        let mut amplitudes = Vector4::zeros();
        amplitudes[k] = linalg::ONE;
        StateVector { amplitudes }
    }

    /// `|ψ⟩ ⊗ |0⟩` for a normalized system state.
    pub fn with_ancilla_zero(system: [C64; 2]) -> Result<StateVector> {
        let norm2 = system[0].norm_sqr() + system[1].norm_sqr();
        if !((norm2 - 1.0).abs() <= tol::CONSTRUCT) {
            return Err(QmapError::invalid(format!("state norm² is {norm2}")));
        }
        Ok(StateVector {
            amplitudes: Vector4::new(system[0], linalg::ZERO, system[1], linalg::ZERO),
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Applies a unitary gate; measurements are no-ops here.
    pub fn apply(&mut self, gate: &Gate) {
        if let Some(u) = gate.unitary() {
            self.amplitudes = u * self.amplitudes;
        }
    }
}

/// Outcome probabilities and conditional system states of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Simulation {
    pub probabilities: [f64; 2],
    /// Normalized conditional states; `None` for outcomes of probability zero.
    pub states: [Option<QubitOperator>; 2],
}

impl Simulation {
    /// `Σₐ P(a)·ρₐ`.
    pub fn unconditional(&self) -> QubitOperator {
        let mut out = QubitOperator::zero();
        for a in 0..2 {
            if let Some(s) = self.states[a] {
                out = out + s * self.probabilities[a];
            }
        }
        out
    }
}

/// Result of sampling one ancilla outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampledRun {
    pub outcome: usize,
    pub state: QubitOperator,
}

/// Probabilities below this are reported as impossible outcomes.
const NULL_PROBABILITY: f64 = 1e-15;

pub(crate) fn check_input(rho: &QubitOperator) -> Result<()> {
    let herm = rho.hermiticity_gap();
    let tr = rho.trace();
    if !(herm <= tol::CONSTRUCT && (tr - linalg::ONE).norm() <= tol::CONSTRUCT) {
        return Err(QmapError::invalid(
            "input must be a Hermitian unit-trace density matrix",
        ));
    }
    let min = linalg::hermitian_eig(&rho.0)?.min();
    if min < -tol::POSITIVITY {
        return Err(QmapError::invalid(format!(
            "input is not positive semidefinite (eigenvalue {min:.3e})"
        )));
    }
    Ok(())
}

/// Exact outcome distribution and conditional states for input `rho`.
pub fn simulate(circuit: &Circuit, rho: &QubitOperator) -> Result<Simulation> {
    circuit.validate()?;
    check_input(rho)?;
    Ok(simulate_maps(&circuit.conditional_maps(), rho))
}

pub(crate) fn simulate_maps(maps: &[SuperOp; 2], rho: &QubitOperator) -> Simulation {
    let mut probabilities = [0.0; 2];
    let mut states = [None; 2];
    for a in 0..2 {
        let out = maps[a].apply(rho);
        let p = out.trace().re.max(0.0);
        probabilities[a] = p;
        if p > NULL_PROBABILITY {
            states[a] = Some(out * (1.0 / p));
        }
    }
    let total = probabilities[0] + probabilities[1];
    if total > 0.0 {
        probabilities.iter_mut().for_each(|p| *p /= total);
    }
    Simulation {
        probabilities,
        states,
    }
}

/// Draws one ancilla outcome and returns its conditional state.
pub fn simulate_sampled<R: Rng + ?Sized>(
    circuit: &Circuit,
    rho: &QubitOperator,
    rng: &mut R,
) -> Result<SampledRun> {
    let sim = simulate(circuit, rho)?;
    let outcome = usize::from(rng.gen::<f64>() < sim.probabilities[1]);
    let state = sim.states[outcome].ok_or_else(|| {
        QmapError::Numerical("sampled an outcome of probability zero".to_string())
    })?;
    Ok(SampledRun { outcome, state })
}

/// System channel of the circuit, summed over measurement outcomes.
pub fn channel_of(circuit: &Circuit) -> SuperOp {
    let [m0, m1] = circuit.conditional_maps();
    m0 + m1
}

/// `V` on the system, `Ry(μ)` on the ancilla, CNOT system→ancilla,
/// `Ry(−ν)` on the ancilla, CNOT ancilla→system, `U` on the system, then
/// ancilla measurement. Outcome `k` applies Kraus operator `U Fₖ V`.
pub fn circuit_of_extremal(ch: &ExtremalChannel) -> Circuit {
    Circuit {
        gates: vec![
            Gate::Unitary1q {
                matrix: ch.v_pre,
                wire: SYSTEM,
            },
            Gate::Ry {
                theta: ch.mu,
                wire: ANCILLA,
            },
            Gate::Cnot {
                control: SYSTEM,
                target: ANCILLA,
            },
            Gate::Ry {
                theta: -ch.nu,
                wire: ANCILLA,
            },
            Gate::Cnot {
                control: ANCILLA,
                target: SYSTEM,
            },
            Gate::Unitary1q {
                matrix: ch.u_post,
                wire: SYSTEM,
            },
            Gate::Measure { wire: ANCILLA },
        ],
    }
}

/// Kraus pair realized by [`circuit_of_extremal`], for reference.
pub fn extremal_kraus(ch: &ExtremalChannel) -> [QubitOperator; 2] {
    let (f0, f1) = kraus_of_extremal(ch.mu, ch.nu);
    [ch.u_post * f0 * ch.v_pre, ch.u_post * f1 * ch.v_pre]
}

/// `%.{digits}g`-style formatting with `-0` written as `0`.
pub fn format_general(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mant = trim_fraction(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let prec = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", prec, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn num(x: f64) -> String {
    format_general(x, TEXT_DIGITS)
}

/// Gate list as text, one gate per line with a trailing newline.
pub fn export_text(circuit: &Circuit) -> String {
    let mut out = String::new();
    for g in &circuit.gates {
        match *g {
            Gate::Unitary1q { matrix, wire } => {
                let _ = write!(out, "unitary {wire}");
                for z in [
                    matrix.0[(0, 0)],
                    matrix.0[(0, 1)],
                    matrix.0[(1, 0)],
                    matrix.0[(1, 1)],
                ] {
                    let _ = write!(out, " {} {}", num(z.re), num(z.im));
                }
                out.push('\n');
            }
            Gate::Ry { theta, wire } => {
                let _ = writeln!(out, "ry {wire} {}", num(theta));
            }
            Gate::Cnot { control, target } => {
                let _ = writeln!(out, "cnot {control} {target}");
            }
            Gate::Measure { wire } => {
                let _ = writeln!(out, "measure {wire}");
            }
        }
    }
    out
}

/// Parses [`export_text`] output. Blank lines and `#` comments are skipped.
pub fn import_text(text: &str) -> Result<Circuit> {
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| QmapError::Parse { line: line_no, msg };
        let mut tok = line.split_whitespace();
        let head = tok.next().expect("non-empty line");
        let rest: Vec<&str> = tok.collect();
        let wire = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| err(format!("bad wire index {s:?}")))
        };
        let real = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| err(format!("bad number {s:?}")))
        };
        let arity = |n: usize| -> Result<()> {
            if rest.len() == n {
                Ok(())
            } else {
                Err(err(format!(
                    "{head} takes {n} arguments, got {}",
                    rest.len()
                )))
            }
        };
        let gate = match head {
            "unitary" => {
                arity(9)?;
                let mut v = [0.0; 8];
                for (k, s) in rest[1..].iter().enumerate() {
                    v[k] = real(s)?;
                }
                Gate::Unitary1q {
                    matrix: QubitOperator(Mat2::new(
                        c(v[0], v[1]),
                        c(v[2], v[3]),
                        c(v[4], v[5]),
                        c(v[6], v[7]),
                    )),
                    wire: wire(rest[0])?,
                }
            }
            "ry" => {
                arity(2)?;
                Gate::Ry {
                    theta: real(rest[1])?,
                    wire: wire(rest[0])?,
                }
            }
            "cnot" => {
                arity(2)?;
                Gate::Cnot {
                    control: wire(rest[0])?,
                    target: wire(rest[1])?,
                }
            }
            "measure" => {
                arity(1)?;
                Gate::Measure {
                    wire: wire(rest[0])?,
                }
            }
            other => return Err(err(format!("unknown gate {other:?}"))),
        };
        gates.push(gate);
    }
    Circuit::new(gates)
}
