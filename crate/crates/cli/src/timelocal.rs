// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Excited-state population under a time-local generator with signed rates.
//!
//! Series, with `ρ₀ = |0⟩⟨0|` and `ρ' = Λ_{t',0}(ρ₀)`:
//!
//! - `a`: `Λ_{t,0}(ρ₀)`
//! - `b`: `Λ_{t,t'}(ρ')`
//! - `c`: `Λ_{t−t',0}(ρ')`, exact only
//! - `d`: `Λ_{t,t'}(σx ρ' σx)`

use qmapsim_core::decomp::decompose_full;
use qmapsim_core::mastereq::{all_negative_window, propagate_default, Direction, GeneratorSpec};
use qmapsim_core::qmap::{cp_defect, Axis, QubitOperator, SuperOp};
use qmapsim_core::sampler::{derive_seed, estimate_expectation};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::format::{flag, opt_sci, sci};

pub const HEADER: &str =
    "time,series,population_exact,population_sampled,stderr,cp_defect,all_rates_negative";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Series {
    A,
    B,
    C,
    D,
}

impl Series {
    pub const ALL: [Series; 4] = [Series::A, Series::B, Series::C, Series::D];

    pub fn label(self) -> &'static str {
        match self {
            Series::A => "a",
            Series::B => "b",
            Series::C => "c",
            Series::D => "d",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimelocalRow {
    pub time: f64,
    pub series: Series,
    pub population_exact: f64,
    pub population_sampled: Option<f64>,
    pub stderr: Option<f64>,
    pub cp_defect: f64,
    pub all_rates_negative: bool,
}

impl TimelocalRow {
    pub fn to_csv(&self) -> String {
        [
            sci(self.time),
            self.series.label().to_string(),
            sci(self.population_exact),
            opt_sci(self.population_sampled),
            opt_sci(self.stderr),
            sci(self.cp_defect),
            flag(self.all_rates_negative).to_string(),
        ]
        .join(",")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimelocalReport {
    pub rows: Vec<TimelocalRow>,
    /// Maximal grid intervals on which every rate is negative.
    pub negative_windows: Vec<(f64, f64)>,
}

fn rates_negative(spec: &GeneratorSpec, t: f64) -> bool {
    let r = spec.rates_at(t);
    !r.is_empty() && r.iter().all(|&g| g < 0.0)
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<TimelocalReport> {
    cfg.validate()?;
    let spec = cfg.generator(Direction::Forward)?;
    let times = cfg.grid()?.points();
    let tp = cfg.t_prime;
    let rho0 = QubitOperator::basis_state(0);
    let rho_p = propagate_default(&spec, 0.0, tp)?.map.apply(&rho0);
    let flipped = QubitOperator::sigma_x() * rho_p * QubitOperator::sigma_x();

    let sample = |map: &SuperOp, rho: &QubitOperator, tag: u64| -> CliResult<(f64, f64)> {
        let dm = decompose_full(map)?;
        let plan = cfg.plan.with_seed(derive_seed(cfg.plan.seed, tag));
        let e = estimate_expectation(&dm, rho, Axis::Z, &plan, cfg.readout.as_ref(), cfg.mitigate)?;
        Ok((0.5 * (1.0 + e.mean), 0.5 * e.std_error))
    };

    let mut rows = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let negative = rates_negative(&spec, t);
        let mut push = |series: Series, map: &SuperOp, rho: &QubitOperator, sampled: bool| {
            let exact = map.apply(rho).excited_population();
            let (ps, se) = if sampled && !cfg.exact_only {
                let (p, s) = sample(map, rho, ((series as u64) << 32) | k as u64)?;
                (Some(p), Some(s))
            } else {
                (None, None)
            };
            rows.push(TimelocalRow {
                time: t,
                series,
                population_exact: exact,
                population_sampled: ps,
                stderr: se,
                cp_defect: cp_defect(map)?,
                all_rates_negative: negative,
            });
            CliResult::Ok(())
        };
        let from_zero = propagate_default(&spec, 0.0, t)?.map;
        push(Series::A, &from_zero, &rho0, true)?;
        if t >= tp {
            let from_tp = propagate_default(&spec, tp, t)?.map;
            let shifted = propagate_default(&spec, 0.0, t - tp)?.map;
            push(Series::B, &from_tp, &rho_p, true)?;
            push(Series::C, &shifted, &rho_p, false)?;
            push(Series::D, &from_tp, &flipped, true)?;
        }
    }
    Ok(TimelocalReport {
        rows,
        negative_windows: all_negative_window(&spec, &times)?,
    })
}

pub fn to_csv(rows: &[TimelocalRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}
