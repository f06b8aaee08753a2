// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Decomposition dump: the branch data as JSON and one gate-list file per
//! branch with non-zero sampling weight.

use std::path::{Path, PathBuf};

use qmapsim_core::circuit::{circuit_of_extremal, export_text};
use qmapsim_core::decomp::{decompose_full, DecomposedMap};
use qmapsim_core::mastereq::propagate_default;
use qmapsim_core::qmap::SuperOp;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// The map selected by the config: an explicit superoperator, or the
/// model's propagator over `[t_start, t_end]` in the configured direction.
pub fn source_map(cfg: &ExperimentConfig) -> CliResult<SuperOp> {
    if let Some(s) = cfg.superop {
        return Ok(s);
    }
    let spec = cfg.generator(cfg.direction)?;
    Ok(propagate_default(&spec, cfg.t_start, cfg.t_end)?.map)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecomposeOutput {
    pub map: DecomposedMap,
    pub json: String,
    /// `(branch index, gate-list text)` for branches that can be sampled.
    pub circuits: Vec<(usize, String)>,
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<DecomposeOutput> {
    cfg.validate()?;
    let map = decompose_full(&source_map(cfg)?)?;
    let mut json = serde_json::to_string_pretty(&map)
        .map_err(|e| CliError::Numerical(format!("serializing decomposition: {e}")))?;
    json.push('\n');
    let circuits = map
        .active_branches()
        .map(|(k, b)| (k, export_text(&circuit_of_extremal(&b.channel))))
        .collect();
    Ok(DecomposeOutput {
        map,
        json,
        circuits,
    })
}

/// `<dir>/<stem>_branch<k>.qgl` next to the JSON output.
pub fn circuit_path(json_path: &Path, branch: usize) -> PathBuf {
    let stem = json_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "decomposition".into());
    json_path.with_file_name(format!("{stem}_branch{branch}.qgl"))
}
