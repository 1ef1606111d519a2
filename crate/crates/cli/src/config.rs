//! Experiment configuration: a TOML file with `[metric]`, `[grid]`, `[solver]`
//! and `[experiment]` tables. Every key is optional and falls back to the
//! desk-scale defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sm_tomo::geometry::{MetricKind, MetricParams};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub metric: MetricParams,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub experiment: ExperimentConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            metric: MetricParams::euclidean(),
            grid: GridConfig::default(),
            solver: SolverConfig::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub nx: usize,
    pub ntheta: usize,
    pub nbeta: usize,
    pub nalpha: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { nx: 65, ntheta: 128, nbeta: 256, nalpha: 128 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub cg_tol: f64,
    pub max_iter: usize,
    pub ray_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { cg_tol: 1e-4, max_iter: 100, ray_step: 1e-2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Subcommand executed by `smtomo run`.
    pub name: String,
    pub out: PathBuf,
    pub seed: u64,
    /// Tensor rank for the rank-dependent suites.
    pub rank: usize,
    /// Fixture for `emit-fixture` when no name is given on the command line.
    pub fixture: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "santalo".into(),
            out: PathBuf::from("out"),
            seed: 0,
            rank: 1,
            fixture: "P_POLY".into(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Scales every grid, and the ray step, by `2^k`.
    pub fn refined(mut self, k: u32) -> Self {
        let f = 1usize << k;
        self.grid.nx = (self.grid.nx - 1) * f + 1;
        self.grid.ntheta *= f;
        self.grid.nbeta *= f;
        self.grid.nalpha *= f;
        self.solver.ray_step /= f as f64;
        self
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        let bad = |msg: String| Err(CliError::Config(msg));
        if g.ntheta < 64 || !g.ntheta.is_power_of_two() {
            return bad(format!("grid.ntheta = {} must be a power of two >= 64", g.ntheta));
        }
        if g.nx < 33 {
            return bad(format!("grid.nx = {} must be at least 33", g.nx));
        }
        if g.nbeta < 8 || g.nalpha < 4 {
            return bad(format!("fan-beam grid {} x {} is too coarse (need nbeta >= 8, nalpha >= 4)", g.nbeta, g.nalpha));
        }
        let s = &self.solver;
        if !(s.cg_tol > 0.0 && s.cg_tol < 1.0) {
            return bad(format!("solver.cg_tol = {} must lie in (0, 1)", s.cg_tol));
        }
        if s.max_iter == 0 {
            return bad("solver.max_iter must be positive".into());
        }
        if !(s.ray_step > 0.0 && s.ray_step <= 0.1) {
            return bad(format!("solver.ray_step = {} must lie in (0, 0.1]", s.ray_step));
        }
        if self.experiment.rank > 2 {
            return bad(format!("experiment.rank = {} must be 0, 1 or 2", self.experiment.rank));
        }
        if self.metric.kind == MetricKind::Bump {
            sm_tomo::geometry::make_metric::<f64>(self.metric).map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }
}
