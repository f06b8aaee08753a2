// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use qmapsim_core::mastereq::{fig3_spec, thermal_spec, Direction, GeneratorSpec};
use qmapsim_core::qmap::{BlochVector, SuperOp};
use qmapsim_core::sampler::{ReadoutModel, ShotPlan};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Recover,
    Timelocal,
    Decompose,
}

impl Experiment {
    pub fn default_output(self) -> &'static str {
        match self {
            Experiment::Recover => "recover.csv",
            Experiment::Timelocal => "timelocal.csv",
            Experiment::Decompose => "decomposition.json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// `H = ωσz/2`, emission `γe^{βω}`, absorption `γ`.
    Thermal,
    /// Four channels with the oscillating signed rates.
    Fig3,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(t_min: f64, t_max: f64, n_points: usize) -> Self {
        Grid {
            t_min,
            t_max,
            n_points,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.t_max - self.t_min) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|k| {
                if k + 1 == self.n_points {
                    self.t_max
                } else {
                    self.t_min + k as f64 * step
                }
            })
            .collect()
    }

    fn validate(&self) -> CliResult<()> {
        if !(self.t_min.is_finite() && self.t_max.is_finite() && self.t_min >= 0.0) {
            return Err(CliError::Config(
                "grid bounds must be finite and non-negative".into(),
            ));
        }
        if !(self.t_max > self.t_min) || self.n_points < 2 {
            return Err(CliError::Config(
                "grid must be increasing with at least 2 points".into(),
            ));
        }
        Ok(())
    }

    fn contains(&self, t: f64) -> bool {
        t >= self.t_min && t <= self.t_max
    }
}

/// Experiment configuration. Every field is optional in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    /// Defaults to `thermal` for recover and decompose, `fig3` for timelocal.
    pub model: Option<Model>,
    pub beta: f64,
    pub omega: f64,
    pub gamma: f64,
    pub t_star: f64,
    pub t_prime: f64,
    pub grid: Option<Grid>,
    pub plan: ShotPlan,
    pub exact_only: bool,
    pub output_path: Option<PathBuf>,
    /// Initial Bloch vectors for recover.
    pub states: Option<Vec<[f64; 3]>>,
    /// Interval and direction of the decomposed propagator.
    pub t_start: f64,
    pub t_end: f64,
    pub direction: Direction,
    /// Explicit map for decompose; overrides the model.
    pub superop: Option<SuperOp>,
    pub readout: Option<ReadoutModel>,
    pub mitigate: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            model: None,
            beta: 1.0,
            omega: 1.0,
            gamma: 1.0,
            t_star: 1.0,
            t_prime: 0.2,
            grid: None,
            plan: ShotPlan::default(),
            exact_only: false,
            output_path: None,
            states: None,
            t_start: 0.0,
            t_end: 1.0,
            direction: Direction::Reversed,
            superop: None,
            readout: None,
            mitigate: false,
        }
    }
}

pub fn default_states() -> Vec<BlochVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        BlochVector::new(0.0, 0.0, 1.0),
        BlochVector::new(0.0, 0.0, -1.0),
        BlochVector::new(1.0, 0.0, 0.0),
        BlochVector::new(h, 0.0, h),
    ]
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn experiment(&self) -> CliResult<Experiment> {
        self.experiment
            .ok_or_else(|| CliError::Config("no experiment selected".into()))
    }

    pub fn model(&self) -> CliResult<Model> {
        Ok(self.model.unwrap_or(match self.experiment()? {
            Experiment::Timelocal => Model::Fig3,
            _ => Model::Thermal,
        }))
    }

    pub fn grid(&self) -> CliResult<Grid> {
        Ok(self.grid.unwrap_or(match self.experiment()? {
            Experiment::Recover => Grid::new(0.0, 2.0 * self.t_star, 41),
            _ => Grid::new(0.0, 1.2, 61),
        }))
    }

    pub fn output_path(&self) -> CliResult<PathBuf> {
        Ok(self.output_path.clone().unwrap_or_else(|| {
            PathBuf::from(
                self.experiment()
                    .map(|e| e.default_output())
                    .unwrap_or("out"),
            )
        }))
    }

    pub fn initial_states(&self) -> Vec<BlochVector> {
        match &self.states {
            Some(s) => s
                .iter()
                .map(|w| BlochVector::new(w[0], w[1], w[2]))
                .collect(),
            None => default_states(),
        }
    }

    /// Generator of the configured model with the given direction.
    pub fn generator(&self, direction: Direction) -> CliResult<GeneratorSpec> {
        let mut spec = match self.model()? {
            Model::Thermal => thermal_spec(self.beta, self.omega, self.gamma, direction),
            Model::Fig3 => fig3_spec(),
        };
        spec.sign = direction;
        Ok(spec)
    }

    pub fn validate(&self) -> CliResult<()> {
        let experiment = self.experiment()?;
        for (name, v) in [
            ("beta", self.beta),
            ("omega", self.omega),
            ("gamma", self.gamma),
        ] {
            if !v.is_finite() {
                return Err(CliError::Config(format!("{name} must be finite")));
            }
        }
        if self.gamma < 0.0 {
            return Err(CliError::Config("gamma must be non-negative".into()));
        }
        self.plan.validate()?;
        if let Some(m) = &self.readout {
            m.validate()?;
        }
        match experiment {
            Experiment::Recover => {
                if self.model()? != Model::Thermal {
                    return Err(CliError::Config("recover needs the thermal model".into()));
                }
                let grid = self.grid()?;
                grid.validate()?;
                if !(self.t_star >= 0.0 && grid.contains(self.t_star)) {
                    return Err(CliError::Config(format!(
                        "t_star = {} lies outside the grid [{}, {}]",
                        self.t_star, grid.t_min, grid.t_max
                    )));
                }
                for w in self.initial_states() {
                    if !(w.norm() <= 1.0 + 1e-12) {
                        return Err(CliError::Config(format!(
                            "initial Bloch vector {:?} lies outside the unit ball",
                            w.0.as_slice()
                        )));
                    }
                }
            }
            Experiment::Timelocal => {
                let grid = self.grid()?;
                grid.validate()?;
                if !grid.contains(self.t_prime) {
                    return Err(CliError::Config(format!(
                        "t_prime = {} lies outside the grid [{}, {}]",
                        self.t_prime, grid.t_min, grid.t_max
                    )));
                }
            }
            Experiment::Decompose => {
                if self.superop.is_none()
                    && !(self.t_start.is_finite()
                        && self.t_end.is_finite()
                        && self.t_end >= self.t_start)
                {
                    return Err(CliError::Config("need t_start ≤ t_end".into()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_end_exactly() {
        let g = Grid::new(0.0, 1.2, 61);
        let p = g.points();
        assert_eq!(p.len(), 61);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[60], 1.2);
        assert!((p[10] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn defaults_per_experiment() {
        let mut cfg = ExperimentConfig {
            experiment: Some(Experiment::Recover),
            ..Default::default()
        };
        assert_eq!(cfg.grid().unwrap(), Grid::new(0.0, 2.0, 41));
        assert_eq!(cfg.model().unwrap(), Model::Thermal);
        cfg.experiment = Some(Experiment::Timelocal);
        assert_eq!(cfg.model().unwrap(), Model::Fig3);
        assert_eq!(cfg.grid().unwrap(), Grid::new(0.0, 1.2, 61));
        cfg.validate().unwrap();
    }

    #[test]
    fn json_partial_and_unknown_fields() {
        let cfg = ExperimentConfig::from_json(r#"{"t_star": 0.5, "plan": {"shots": 10}}"#).unwrap();
        assert_eq!(cfg.t_star, 0.5);
        assert_eq!(cfg.plan.shots, 10);
        assert_eq!(cfg.plan.runs, 10);
        assert!(ExperimentConfig::from_json(r#"{"tstar": 1}"#).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let base = ExperimentConfig {
            experiment: Some(Experiment::Recover),
            ..Default::default()
        };
        let bad = [
            ExperimentConfig {
                t_star: 5.0,
                grid: Some(Grid::new(0.0, 2.0, 11)),
                ..base.clone()
            },
            ExperimentConfig {
                grid: Some(Grid::new(1.0, 0.5, 11)),
                ..base.clone()
            },
            ExperimentConfig {
                plan: ShotPlan::new(0, 1, 1),
                ..base.clone()
            },
            ExperimentConfig {
                states: Some(vec![[1.0, 1.0, 0.0]]),
                ..base.clone()
            },
            ExperimentConfig {
                model: Some(Model::Fig3),
                ..base.clone()
            },
        ];
        for cfg in bad {
            assert!(
                matches!(cfg.validate(), Err(CliError::Config(_))),
                "{cfg:?}"
            );
        }
    }
}
