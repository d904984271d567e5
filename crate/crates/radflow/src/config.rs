//! Run configuration, read from a single JSON document.
//!
//! ```json
//! {
//!   "grid":     { "intervals": 512, "r_max": 100.0, "stretching": { "kind": "sinh", "scale": 4.0 } },
//!   "profile":  { "family": { "kind": "bump", "amplitude": 0.5, "width": 2.0 }, "dimension": 3 },
//!   "solver":   { "t_end": 20.0, "dt_out": 0.25 },
//!   "diagnostics": { "cadence": 0.25, "allowance": { "self_convergence": 10.0 } },
//!   "seed": 0
//! }
//! ```
//!
//! Every section may be omitted and falls back to the default run. A profile
//! can also be read from a two-column CSV file: `"profile": { "table": "f.csv", "dimension": 3 }`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use radflow_core::diagnostics::SphereFamily;
use radflow_core::{GridSpec, ProfileSpec, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSource {
    /// `(r, f)` samples in a CSV file, resampled onto the grid.
    TableFile {
        table: PathBuf,
        dimension: usize,
    },
    Spec(ProfileSpec),
}

impl Default for ProfileSource {
    fn default() -> Self {
        ProfileSource::Spec(ProfileSpec::bump(0.5, 2.0, 3))
    }
}

impl ProfileSource {
    pub fn dimension(&self) -> usize {
        match self {
            ProfileSource::TableFile { dimension, .. } => *dimension,
            ProfileSource::Spec(s) => s.dimension,
        }
    }
}

/// Tolerances for the bound checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllowanceRule {
    /// Multiplier on the Richardson estimate from a run on the half-resolution grid.
    SelfConvergence(f64),
    Uniform(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiagnosticsConfig {
    /// Time between diagnosed snapshots; defaults to the output cadence.
    pub cadence: Option<f64>,
    pub allowance: AllowanceRule,
    pub families: Vec<SphereFamily>,
    /// Relative tolerance on ADM mass drift.
    pub adm_tolerance: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            cadence: None,
            allowance: AllowanceRule::SelfConvergence(10.0),
            families: default_families(),
            adm_tolerance: 0.02,
        }
    }
}

pub fn default_families() -> Vec<SphereFamily> {
    vec![
        SphereFamily::FixedArea(1.0),
        SphereFamily::FixedVolume(4.0 * std::f64::consts::PI / 3.0),
        SphereFamily::FixedProperRadius(1.0),
    ]
}

/// Deliberate corruption of the stored trajectory, for exercising failure paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultInjection {
    /// Added to `f` at the node of largest `f` in the middle snapshot.
    pub delta_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub profile: ProfileSource,
    pub solver: SolverConfig,
    pub diagnostics: DiagnosticsConfig,
    pub preset: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub fault: Option<FaultInjection>,
}

impl RunConfig {
    /// Reads and validates a config. Relative table paths are resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if let ProfileSource::TableFile { table, .. } = &mut cfg.profile {
            if table.is_relative() {
                if let Some(dir) = path.parent() {
                    *table = dir.join(&*table);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.grid.build()?;
        if let Some(c) = self.diagnostics.cadence {
            if !(c > 0.0 && c <= self.solver.t_end) {
                bail!("diagnostics cadence must lie in (0, t_end], got {c}");
            }
        }
        match self.diagnostics.allowance {
            AllowanceRule::SelfConvergence(m) | AllowanceRule::Uniform(m) if !(m >= 0.0) => {
                bail!("allowance parameter must be non-negative, got {m}")
            }
            AllowanceRule::SelfConvergence(_) if self.grid.intervals % 2 != 0 => {
                bail!("self-convergence allowances need an even number of intervals")
            }
            _ => {}
        }
        if !(self.diagnostics.adm_tolerance > 0.0) {
            bail!("adm_tolerance must be positive");
        }
        match &self.profile {
            ProfileSource::TableFile { table, dimension } => {
                if !table.is_file() {
                    bail!("profile table {} does not exist", table.display());
                }
                if *dimension < 3 {
                    bail!("dimension must be at least 3, got {dimension}");
                }
            }
            ProfileSource::Spec(s) => s.validate()?,
        }
        Ok(())
    }

    /// Stride through the stored snapshots matching the diagnostics cadence.
    pub fn diagnostic_stride(&self) -> usize {
        match self.diagnostics.cadence {
            Some(c) => ((c / self.solver.dt_out).round() as usize).max(1),
            None => 1,
        }
    }
}
