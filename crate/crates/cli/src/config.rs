use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use syzq_core::numerics::NumericsConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Abelian,
    Toric,
    #[serde(alias = "demo")]
    SemiflatDemo,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Abelian => "abelian",
            Mode::Toric => "toric",
            Mode::SemiflatDemo => "semiflat-demo",
        }
    }
}

/// Which artifacts to write next to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmitFlags {
    pub report: bool,
    pub theta_grid: bool,
    pub character_grid: bool,
    pub concentration_table: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            report: true,
            theta_grid: false,
            character_grid: false,
            concentration_table: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConcentrationSettings {
    pub radii: Vec<f64>,
    pub hbars: Vec<f64>,
}

impl Default for ConcentrationSettings {
    fn default() -> Self {
        Self {
            radii: vec![0.1, 0.25],
            hbars: vec![1.0, 0.5, 0.2, 0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DemoSettings {
    pub k: Vec<i64>,
}

impl Default for DemoSettings {
    fn default() -> Self {
        Self {
            k: vec![-2, -1, 0, 1, 2, 3],
        }
    }
}

/// Contents of the `--config` file. The datum payload stays untyped here
/// and is parsed by the pipeline of the selected mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub datum: Value,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub emit: EmitFlags,
    #[serde(default)]
    pub concentration: ConcentrationSettings,
    #[serde(default)]
    pub demo: DemoSettings,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Worker threads; all available cores when absent.
    #[serde(default)]
    pub parallel: Option<usize>,
}

/// Command-line overrides of the numerical knobs.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub truncation: Option<i64>,
    pub grid: Option<usize>,
    pub fd_step: Option<f64>,
    pub hbar: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut NumericsConfig) {
        if let Some(r) = self.truncation {
            cfg.truncation = r;
        }
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        if let Some(h) = self.fd_step {
            cfg.fd_step = h;
        }
        if let Some(h) = self.hbar {
            cfg.hbar = h;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
    }
}
