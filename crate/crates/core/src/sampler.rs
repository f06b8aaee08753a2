// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quasiprobability Monte Carlo estimation of Pauli expectation values.
//!
//! Each shot draws a sign (`+` with probability `(1+p)/(1+2p)`), one of the
//! two channels of that sign, an ancilla outcome of the channel's circuit and
//! a `±1` outcome of the observable on the conditional system state. The shot
//! value is `(1+2p)·sign·outcome`.
//!
//! Shot `k` uses its own ChaCha8 stream, `k` on the key derived from the
//! seed, and sums are reduced over fixed-size chunks in order, so results do
//! not depend on the number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{check_input, circuit_of_extremal, simulate_maps};
use crate::decomp::{BranchSign, DecomposedMap};
use crate::error::{QmapError, Result};
use crate::qmap::{from_bloch, Axis, BlochVector, QubitOperator};
use crate::tol;

pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_RUNS: u64 = 10;
const CHUNK: u64 = 4096;

/// `runs × shots` shots in total, all drawn from streams keyed by `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShotPlan {
    pub shots: u64,
    pub seed: u64,
    pub runs: u64,
}

impl Default for ShotPlan {
    fn default() -> Self {
        ShotPlan {
            shots: DEFAULT_SHOTS,
            seed: 0,
            runs: DEFAULT_RUNS,
        }
    }
}

impl ShotPlan {
    pub fn new(shots: u64, seed: u64, runs: u64) -> Self {
        ShotPlan { shots, seed, runs }
    }

    pub fn total_shots(&self) -> u64 {
        self.shots.saturating_mul(self.runs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 || self.runs == 0 {
            return Err(QmapError::invalid("shot plan needs shots ≥ 1 and runs ≥ 1"));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ShotPlan { seed, ..*self }
    }
}

/// SplitMix64 finalizer of `seed ⊕ tag`, for deriving independent seeds.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream of shot `index`.
pub fn shot_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Asymmetric bit-flip readout noise on the system measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    /// P(read 1 | true 0).
    pub p10: f64,
    /// P(read 0 | true 1).
    pub p01: f64,
}

impl ReadoutModel {
    pub fn new(p10: f64, p01: f64) -> Result<Self> {
        let m = ReadoutModel { p10, p01 };
        m.validate()?;
        Ok(m)
    }

    pub fn ideal() -> Self {
        ReadoutModel { p10: 0.0, p01: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| (0.0..=1.0).contains(&x);
        if !(ok(self.p10) && ok(self.p01)) {
            return Err(QmapError::invalid(
                "readout flip probabilities must lie in [0, 1]",
            ));
        }
        Ok(())
    }

    /// `[[1−p10, p01], [p10, 1−p01]]`, columns indexed by the true bit.
    pub fn confusion(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p10, self.p01], [self.p10, 1.0 - self.p01]]
    }

    pub fn inverse_confusion(&self) -> Result<[[f64; 2]; 2]> {
        let det = 1.0 - self.p10 - self.p01;
        if det.abs() <= tol::CONSTRUCT {
            return Err(QmapError::Singular {
                condition: f64::INFINITY,
            });
        }
        let [[a, b], [cc, d]] = self.confusion();
        Ok([[d / det, -b / det], [-cc / det, a / det]])
    }
}

/// Flips `bit` according to `model`.
pub fn corrupt_readout<R: Rng + ?Sized>(bit: u8, model: &ReadoutModel, rng: &mut R) -> u8 {
    let flip = if bit == 0 { model.p10 } else { model.p01 };
    if flip > 0.0 && rng.gen::<f64>() < flip {
        1 - bit
    } else {
        bit
    }
}

/// Applies the inverse confusion matrix to observed frequencies.
pub fn mitigate_readout(freqs: [f64; 2], model: &ReadoutModel) -> Result<[f64; 2]> {
    let inv = model.inverse_confusion()?;
    Ok([
        inv[0][0] * freqs[0] + inv[0][1] * freqs[1],
        inv[1][0] * freqs[0] + inv[1][1] * freqs[1],
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub shots_used: u64,
}

/// Exact per-branch data for one input state and observable.
#[derive(Clone, Copy, Debug)]
struct BranchTable {
    sign: f64,
    p_ancilla_one: f64,
    /// P(observable = +1) for ancilla outcome 0 and 1.
    p_plus: [f64; 2],
}

fn branch_tables(dm: &DecomposedMap, rho0: &QubitOperator, axis: Axis) -> [BranchTable; 4] {
    std::array::from_fn(|k| {
        let b = &dm.branches[k];
        let maps = circuit_of_extremal(&b.channel).conditional_maps();
        let sim = simulate_maps(&maps, rho0);
        let p_plus = std::array::from_fn(|a| match sim.states[a] {
            Some(s) => (0.5 * (1.0 + s.expectation(axis))).clamp(0.0, 1.0),
            None => 0.5,
        });
        BranchTable {
            sign: b.sign.value(),
            p_ancilla_one: sim.probabilities[1],
            p_plus,
        }
    })
}

fn check_weights(dm: &DecomposedMap) -> Result<()> {
    let ok = dm.p >= 0.0
        && dm.p.is_finite()
        && dm.branches[..2].iter().all(|b| b.sign == BranchSign::Plus)
        && dm.branches[2..].iter().all(|b| b.sign == BranchSign::Minus);
    if !ok {
        return Err(QmapError::invalid(
            "decomposed map needs p ≥ 0, two + branches then two − branches",
        ));
    }
    Ok(())
}

/// One sampled shot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shot {
    /// Index into [`DecomposedMap::branches`].
    pub branch: usize,
    pub ancilla: u8,
    /// Observed system bit, `0` for the `+1` eigenvalue.
    pub bit: u8,
    pub value: f64,
}

/// Per-shot sampler for one map, input state and observable.
///
/// With a readout model the system bit is corrupted; with `mitigate` each
/// observed bit is scored by the row `(1, −1)·M⁻¹` of the inverse
/// confusion matrix, which keeps the estimator unbiased.
#[derive(Clone, Debug)]
pub struct ShotSampler {
    table: [BranchTable; 4],
    scale: f64,
    p_plus_sign: f64,
    scores: [f64; 2],
    readout: Option<ReadoutModel>,
}

impl ShotSampler {
    pub fn new(
        dm: &DecomposedMap,
        rho0: &QubitOperator,
        axis: Axis,
        readout: Option<&ReadoutModel>,
        mitigate: bool,
    ) -> Result<ShotSampler> {
        check_input(rho0)?;
        check_weights(dm)?;
        let scores = match (readout, mitigate) {
            (Some(m), true) => {
                m.validate()?;
                let inv = m.inverse_confusion()?;
                [inv[0][0] - inv[1][0], inv[0][1] - inv[1][1]]
            }
            (Some(m), false) => {
                m.validate()?;
                [1.0, -1.0]
            }
            (None, _) => [1.0, -1.0],
        };
        Ok(ShotSampler {
            table: branch_tables(dm, rho0, axis),
            scale: dm.overhead(),
            p_plus_sign: (1.0 + dm.p) / (1.0 + 2.0 * dm.p),
            scores,
            readout: readout.copied().filter(|m| m.p10 > 0.0 || m.p01 > 0.0),
        })
    }

    /// Shot `index` of the stream keyed by `seed`.
    pub fn draw(&self, seed: u64, index: u64) -> Shot {
        let mut rng = shot_rng(seed, index);
        let minus = rng.gen::<f64>() >= self.p_plus_sign;
        let second = rng.gen::<bool>();
        let branch = 2 * usize::from(minus) + usize::from(second);
        let b = &self.table[branch];
        let ancilla = u8::from(rng.gen::<f64>() < b.p_ancilla_one);
        let mut bit = u8::from(rng.gen::<f64>() >= b.p_plus[usize::from(ancilla)]);
        if let Some(m) = &self.readout {
            bit = corrupt_readout(bit, m, &mut rng);
        }
        Shot {
            branch,
            ancilla,
            bit,
            value: self.scale * b.sign * self.scores[usize::from(bit)],
        }
    }

    pub fn estimate(&self, plan: &ShotPlan) -> Result<Estimate> {
        plan.validate()?;
        let n = plan.total_shots();
        let chunks: Vec<(f64, f64)> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(n);
                (lo..hi).fold((0.0, 0.0), |(s, s2), i| {
                    let v = self.draw(plan.seed, i).value;
                    (s + v, s2 + v * v)
                })
            })
            .collect();
        let (sum, sum2) = chunks
            .iter()
            .fold((0.0, 0.0), |(s, s2), &(a, b)| (s + a, s2 + b));
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum2 - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok(Estimate {
            mean,
            std_error: (var / nf).sqrt(),
            shots_used: n,
        })
    }
}

/// Estimates `tr(O·Σ(ρ₀))` for a Pauli observable `O`.
pub fn estimate_expectation(
    dm: &DecomposedMap,
    rho0: &QubitOperator,
    axis: Axis,
    plan: &ShotPlan,
    readout: Option<&ReadoutModel>,
    mitigate: bool,
) -> Result<Estimate> {
    plan.validate()?;
    ShotSampler::new(dm, rho0, axis, readout, mitigate)?.estimate(plan)
}

/// Estimates of `⟨σx⟩, ⟨σy⟩, ⟨σz⟩`, each with a seed derived from the plan.
pub fn estimate_bloch(
    dm: &DecomposedMap,
    rho0: &QubitOperator,
    plan: &ShotPlan,
    readout: Option<&ReadoutModel>,
    mitigate: bool,
) -> Result<[Estimate; 3]> {
    let mut out = [Estimate {
        mean: 0.0,
        std_error: 0.0,
        shots_used: 0,
    }; 3];
    for axis in Axis::ALL {
        let p = plan.with_seed(derive_seed(plan.seed, axis.index() as u64 + 1));
        out[axis.index()] = estimate_expectation(dm, rho0, axis, &p, readout, mitigate)?;
    }
    Ok(out)
}

/// `½(I + Σ ⟨σᵢ⟩σᵢ)` from sampled expectation values.
pub fn estimate_state(
    dm: &DecomposedMap,
    rho0: &QubitOperator,
    plan: &ShotPlan,
) -> Result<QubitOperator> {
    let e = estimate_bloch(dm, rho0, plan, None, false)?;
    Ok(from_bloch(&BlochVector::new(
        e[0].mean, e[1].mean, e[2].mean,
    )))
}
