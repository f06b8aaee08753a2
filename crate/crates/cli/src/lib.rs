// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line experiments on top of `qmapsim-core`.
//!
//! - `recover`: forward thermal evolution followed by the reversed map,
//!   exact and sampled Bloch vectors per grid point and initial state (CSV).
//! - `timelocal`: excited population under a generator with signed rates,
//!   four series plus CP defect and rate-sign flags (CSV).
//! - `decompose`: four-branch decomposition of one map (JSON) and the
//!   branch circuits (`.qgl` gate lists).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod decompose;
pub mod error;
pub mod format;
pub mod recover;
pub mod timelocal;

use std::path::{Path, PathBuf};

pub use config::{Experiment, ExperimentConfig, Grid, Model};
pub use error::{CliError, CliResult};

/// Command-line values that replace config fields when present.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub t_star: Option<f64>,
    pub t_prime: Option<f64>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub runs: Option<u64>,
    pub exact_only: bool,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.t_star {
            cfg.t_star = v;
        }
        if let Some(v) = self.t_prime {
            cfg.t_prime = v;
        }
        if let Some(v) = self.shots {
            cfg.plan.shots = v;
        }
        if let Some(v) = self.seed {
            cfg.plan.seed = v;
        }
        if let Some(v) = self.runs {
            cfg.plan.runs = v;
        }
        if self.exact_only {
            cfg.exact_only = true;
        }
        if let Some(p) = &self.out {
            cfg.output_path = Some(p.clone());
        }
    }
}

/// Files written and a short human-readable summary.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Runs the experiment selected in `cfg` and writes its artifacts.
pub fn execute(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let out = cfg.output_path()?;
    let mut outcome = Outcome::default();
    match cfg.experiment()? {
        Experiment::Recover => {
            let rows = recover::run(cfg)?;
            write(&out, &recover::to_csv(&rows))?;
            let last = cfg.grid()?.t_max;
            for r in rows.iter().filter(|r| r.time == last) {
                let sampled = r
                    .fidelity_sampled
                    .map(|f| format!(", sampled {f:.6}"))
                    .unwrap_or_default();
                outcome.summary.push(format!(
                    "state {}: final fidelity exact {:.9}{sampled}",
                    r.state_id, r.fidelity_exact
                ));
            }
        }
        Experiment::Timelocal => {
            let report = timelocal::run(cfg)?;
            write(&out, &timelocal::to_csv(&report.rows))?;
            if report.negative_windows.is_empty() {
                outcome
                    .summary
                    .push("all-negative window: none on grid".into());
            }
            for (a, b) in &report.negative_windows {
                outcome
                    .summary
                    .push(format!("all-negative window: [{a:.6}, {b:.6}]"));
            }
        }
        Experiment::Decompose => {
            let d = decompose::run(cfg)?;
            write(&out, &d.json)?;
            for (k, text) in &d.circuits {
                let path = decompose::circuit_path(&out, *k);
                write(&path, text)?;
                outcome.files.push(path);
            }
            outcome.summary.push(format!(
                "p = {}, overhead 1+2p = {}",
                d.map.p,
                d.map.overhead()
            ));
        }
    }
    outcome.files.insert(0, out);
    Ok(outcome)
}
