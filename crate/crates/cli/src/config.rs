use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tdhf_core::lattice::{Grid, ScaledParams};
use tdhf_core::semiclassics::{DiagnosticsConfig, PositionConvention};

use crate::error::CliError;
use crate::scenarios::find_scenario;

/// One run, as read from a TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub time: TimeConfig,
    pub diagnostics: DiagnosticsToggles,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    pub m: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub n: usize,
    pub alpha: f64,
    /// Overrides `N^{-1/3}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Snapshot every `stride` steps.
    pub stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsToggles {
    pub semiclassics: bool,
    pub window: bool,
    pub fdl: bool,
    pub fock: bool,
    pub energy: bool,
    pub delta: f64,
    pub p: f64,
}

impl Default for DiagnosticsToggles {
    fn default() -> Self {
        Self {
            semiclassics: false,
            window: false,
            fdl: false,
            fock: false,
            energy: false,
            delta: 0.1,
            p: 20.0,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// TOML text that parses back to an identical value.
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks every field against the caps of the numerical modules.
    pub fn validate(&self) -> Result<(), CliError> {
        find_scenario(&self.scenario)?;
        if self.seed > i64::MAX as u64 {
            return Err(field("seed", "must be at most 2^63 - 1"));
        }
        Grid::new(self.grid.d, self.grid.m, self.grid.length).map_err(|e| field("grid", e))?;
        let p = &self.physics;
        if !(p.alpha > 0.0 && p.alpha <= 1.0) {
            return Err(field("physics.alpha", format!("alpha must lie in (0,1], got {}", p.alpha)));
        }
        self.params().map_err(|e| field("physics", e))?;
        let t = &self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            return Err(field("time.dt", format!("must be positive, got {}", t.dt)));
        }
        if !(t.t_final >= 0.0 && t.t_final.is_finite()) {
            return Err(field("time.t_final", format!("must be non-negative, got {}", t.t_final)));
        }
        if t.stride == 0 {
            return Err(field("time.stride", "must be at least 1"));
        }
        self.diagnostics_config(Vec::new())
            .map_err(|e| field("diagnostics", e))?;
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.grid.d, self.grid.m, self.grid.length).expect("validated grid")
    }

    pub fn params(&self) -> tdhf_core::Result<ScaledParams> {
        match self.physics.epsilon {
            Some(eps) => ScaledParams::with_epsilon(self.physics.n, self.physics.alpha, eps),
            None => ScaledParams::new(self.physics.n, self.physics.alpha),
        }
    }

    /// Number of steps covering `[0, T]`.
    pub fn steps(&self) -> usize {
        (self.time.t_final / self.time.dt).round() as usize
    }

    pub fn diagnostics_config(
        &self,
        samples: Vec<tdhf_core::semiclassics::AuditSample>,
    ) -> tdhf_core::Result<DiagnosticsConfig> {
        DiagnosticsConfig::new(
            self.diagnostics.delta,
            self.diagnostics.p,
            samples,
            PositionConvention::Plain,
        )
    }
}

fn field(name: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{name}: {reason}"))
}
