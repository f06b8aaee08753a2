// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! State recovery: thermal evolution up to `t*`, then the reversed
//! generator. For `t > t*` the single map `Λ^rev_{t−t*} ∘ Λ_{t*}` is
//! decomposed and sampled directly on the initial state.

use qmapsim_core::decomp::decompose_full;
use qmapsim_core::mastereq::{propagate_default, Direction};
use qmapsim_core::qmap::{fidelity, from_bloch, to_bloch, BlochVector, QubitOperator, SuperOp};
use qmapsim_core::sampler::{derive_seed, estimate_bloch, Estimate};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::format::{opt_sci, sci};

pub const HEADER: &str = "time,state_id,exact_x,exact_y,exact_z,sampled_x,sampled_y,sampled_z,\
stderr_x,stderr_y,stderr_z,fidelity_exact,fidelity_sampled";

#[derive(Clone, Debug, PartialEq)]
pub struct RecoverRow {
    pub time: f64,
    pub state_id: usize,
    pub exact: BlochVector,
    pub sampled: Option<[Estimate; 3]>,
    pub fidelity_exact: f64,
    pub fidelity_sampled: Option<f64>,
}

impl RecoverRow {
    pub fn sampled_bloch(&self) -> Option<BlochVector> {
        self.sampled
            .map(|e| BlochVector::new(e[0].mean, e[1].mean, e[2].mean))
    }

    pub fn to_csv(&self) -> String {
        let s = self.sampled;
        let mean = |k: usize| s.map(|e| e[k].mean);
        let se = |k: usize| s.map(|e| e[k].std_error);
        [
            sci(self.time),
            self.state_id.to_string(),
            sci(self.exact.0[0]),
            sci(self.exact.0[1]),
            sci(self.exact.0[2]),
            opt_sci(mean(0)),
            opt_sci(mean(1)),
            opt_sci(mean(2)),
            opt_sci(se(0)),
            opt_sci(se(1)),
            opt_sci(se(2)),
            sci(self.fidelity_exact),
            opt_sci(self.fidelity_sampled),
        ]
        .join(",")
    }
}

/// Fidelity of a Bloch estimate to `rho0`, after projecting into the ball.
fn fidelity_to(w: &BlochVector, rho0: &QubitOperator) -> CliResult<f64> {
    Ok(fidelity(&from_bloch(&w.clamped_to_ball()), rho0)?)
}

/// The map taking `ρ₀` to the point at `t` on the forward/backward path.
pub fn path_maps(cfg: &ExperimentConfig, times: &[f64]) -> CliResult<Vec<SuperOp>> {
    let fwd = cfg.generator(Direction::Forward)?;
    let rev = cfg.generator(Direction::Reversed)?;
    let at_star = propagate_default(&fwd, 0.0, cfg.t_star)?.map;
    times
        .iter()
        .map(|&t| {
            Ok(if t <= cfg.t_star {
                propagate_default(&fwd, 0.0, t)?.map
            } else {
                propagate_default(&rev, 0.0, t - cfg.t_star)?
                    .map
                    .compose(&at_star)
            })
        })
        .collect()
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Vec<RecoverRow>> {
    cfg.validate()?;
    let times = cfg.grid()?.points();
    let maps = path_maps(cfg, &times)?;
    let decomposed = if cfg.exact_only {
        None
    } else {
        Some(
            maps.iter()
                .map(decompose_full)
                .collect::<Result<Vec<_>, _>>()?,
        )
    };
    let mut rows = Vec::with_capacity(times.len() * cfg.initial_states().len());
    for (sid, w0) in cfg.initial_states().iter().enumerate() {
        let rho0 = from_bloch(w0);
        for (k, (&time, map)) in times.iter().zip(&maps).enumerate() {
            let exact = to_bloch(&map.apply(&rho0))?;
            let fidelity_exact = fidelity_to(&exact, &rho0)?;
            let sampled = match &decomposed {
                Some(dms) => {
                    let tag = ((sid as u64) << 32) | k as u64;
                    let plan = cfg.plan.with_seed(derive_seed(cfg.plan.seed, tag));
                    Some(estimate_bloch(
                        &dms[k],
                        &rho0,
                        &plan,
                        cfg.readout.as_ref(),
                        cfg.mitigate,
                    )?)
                }
                None => None,
            };
            let fidelity_sampled = match sampled {
                Some(e) => Some(fidelity_to(
                    &BlochVector::new(e[0].mean, e[1].mean, e[2].mean),
                    &rho0,
                )?),
                None => None,
            };
            rows.push(RecoverRow {
                time,
                state_id: sid,
                exact,
                sampled,
                fidelity_exact,
                fidelity_sampled,
            });
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[RecoverRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}
