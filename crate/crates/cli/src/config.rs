//! Run configuration: one strict JSON document per invocation.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use grushin_core::analysis::critical_exponents;
use grushin_core::{build_grid, Domain, LinearSolverCfg, MpaCfg, Nonlinearity};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum NonlinearitySpec {
    #[serde(rename = "power")]
    Power { p: f64 },
    #[serde(rename = "preset")]
    Preset { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

/// Points of a refinement/parameter sweep. Absent lists fall back to the
/// single value of the enclosing config.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub p: Option<Vec<f64>>,
    pub k: Option<Vec<f64>>,
    /// Square grids `n × n`.
    pub grids: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Domain<f64>,
    pub k: f64,
    pub nonlinearity: NonlinearitySpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: MpaCfg<f64>,
    #[serde(default)]
    pub linear: LinearSolverCfg<f64>,
    #[serde(default)]
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Field dump to audit (`pohozaev`).
    pub field: Option<PathBuf>,
    /// Lebesgue exponent (`embed`).
    pub q: Option<f64>,
    pub sweep: Option<SweepSpec>,
    /// Sample count for `check`.
    pub samples: Option<usize>,
}

fn config_err(module: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{module}: {msg}"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| config_err("config", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let domain = Domain::new(*self.domain.kind()).map_err(|e| config_err("domain", e))?;
        critical_exponents(self.k).map_err(|e| config_err("analysis", e))?;
        self.nonlinearity_for(self.k, None)?;
        build_grid(&domain, self.grid.nx, self.grid.ny).map_err(|e| config_err("discretization", e))?;
        self.solver.validate().map_err(|e| config_err("solvers", e))?;
        self.linear.validate().map_err(|e| config_err("solvers", e))?;
        if let Some(q) = self.q {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(config_err("analysis", format!("q must be >= 1, got {q}")));
            }
        }
        if let Some(s) = &self.sweep {
            for &k in s.k.iter().flatten() {
                critical_exponents(k).map_err(|e| config_err("analysis", e))?;
            }
            for &p in s.p.iter().flatten() {
                self.nonlinearity_for(self.k, Some(p))?;
            }
            for &n in s.grids.iter().flatten() {
                build_grid(&domain, n, n).map_err(|e| config_err("discretization", e))?;
            }
            if s.p.as_ref().is_some_and(|p| !p.is_empty())
                && !matches!(self.nonlinearity, NonlinearitySpec::Power { .. })
            {
                return Err(config_err("nonlinearity", "a p-sweep needs a power nonlinearity"));
            }
        }
        Ok(())
    }

    /// The configured nonlinearity at exponent `k`, with `p` overridden for
    /// power laws.
    pub fn nonlinearity_for(&self, k: f64, p: Option<f64>) -> Result<Nonlinearity<f64>, CliError> {
        match &self.nonlinearity {
            NonlinearitySpec::Power { p: p0 } => {
                let p = p.unwrap_or(*p0);
                // p = 1 is linear: no Nehari manifold, no mountain pass
                if !(p > 1.0 && p.is_finite()) {
                    return Err(config_err(
                        "nonlinearity",
                        format!("power exponent must satisfy p >= 1 and be superlinear (p > 1), got p = {p}"),
                    ));
                }
                Nonlinearity::pure_power(p, k).map_err(|e| config_err("nonlinearity", e))
            }
            NonlinearitySpec::Preset { name } => {
                Nonlinearity::preset(name, k).map_err(|e| config_err("nonlinearity", e))
            }
        }
    }

    pub fn power(&self) -> Option<f64> {
        match self.nonlinearity {
            NonlinearitySpec::Power { p } => Some(p),
            NonlinearitySpec::Preset { .. } => None,
        }
    }
}
