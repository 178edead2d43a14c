//! Run configuration, read from a TOML document.
//!
//! ```toml
//! maturities = [0.4, 0.9, 1.3]
//!
//! [model]
//! name = "vg"
//! params = { m = 10.0, g = 8.0, c = 1.5 }
//!
//! [clock]            # optional
//! name = "gamma_ou"
//! params = { lambda = 1.679, a = 0.3484, b = 0.7664, y0 = 1.0 }
//!
//! [grids.k]
//! min = -6.0
//! max = 6.0
//! count = 121
//!
//! [grids.x]
//! min = 0.5
//! max = 30.0
//! count = 60
//! spacing = "linear"  # or "geometric"
//!
//! [output]
//! dir = "out"
//! plot = true
//!
//! [tolerances]
//! wing_fraction = 0.2
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use smilewing_core::{Damping, PricingOptions};

use crate::error::{CliError, CliResult};
use crate::registry;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub maturities: Vec<f64>,
    pub model: NamedParams,
    #[serde(default)]
    pub clock: Option<NamedParams>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// A registry name with its numeric parameters.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedParams {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let w = i as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * w,
                    Spacing::Geometric => self.min * (self.max / self.min).powf(w),
                }
            })
            .collect()
    }

    fn validate(&self, name: &str, positive: bool) -> CliResult<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) || self.count < 2 {
            return Err(CliError::config(format!(
                "grids.{name}: need finite min < max and count >= 2, got min = {}, max = {}, count = {}",
                self.min, self.max, self.count
            )));
        }
        if (positive || self.spacing == Spacing::Geometric) && !(self.min > 0.0) {
            return Err(CliError::config(format!("grids.{name}: min must be positive, got {}", self.min)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default = "default_k")]
    pub k: GridSpec,
    #[serde(default = "default_x")]
    pub x: GridSpec,
}

fn default_k() -> GridSpec {
    GridSpec {
        min: -6.0,
        max: 6.0,
        count: 121,
        spacing: Spacing::Linear,
    }
}

fn default_x() -> GridSpec {
    GridSpec {
        min: 0.5,
        max: 30.0,
        count: 60,
        spacing: Spacing::Linear,
    }
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            k: default_k(),
            x: default_x(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub plot: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

impl Default for Output {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            plot: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DampingChoice {
    #[default]
    Auto,
    Standard,
}

/// Numerical and verification tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub damping: DampingChoice,
    pub epsrel: f64,
    pub scaled_epsabs: f64,
    pub truncation: f64,
    pub max_intervals: usize,
    /// Top fraction of the strike range used by wing fits.
    pub wing_fraction: f64,
    pub alpha_independence: f64,
    pub round_trip: f64,
    pub chebyshev_slack: f64,
    pub monotonicity_slack: f64,
    pub root_residual: f64,
    pub closed_form: f64,
    pub martingale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let p = PricingOptions::default();
        Self {
            damping: DampingChoice::Auto,
            epsrel: p.epsrel,
            scaled_epsabs: p.scaled_epsabs,
            truncation: p.truncation,
            max_intervals: p.max_intervals,
            wing_fraction: 0.2,
            alpha_independence: 1e-8,
            round_trip: 1e-10,
            chebyshev_slack: 1e-9,
            monotonicity_slack: 1e-9,
            root_residual: 1e-10,
            closed_form: 1e-10,
            martingale: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn pricing(&self) -> PricingOptions {
        PricingOptions {
            damping: match self.damping {
                DampingChoice::Auto => Damping::Auto,
                DampingChoice::Standard => Damping::Standard,
            },
            scaled_epsabs: self.scaled_epsabs,
            epsrel: self.epsrel,
            max_intervals: self.max_intervals,
            truncation: self.truncation,
        }
    }

    fn validate(&self) -> CliResult<()> {
        let named = [
            ("epsrel", self.epsrel),
            ("scaled_epsabs", self.scaled_epsabs),
            ("truncation", self.truncation),
            ("alpha_independence", self.alpha_independence),
            ("round_trip", self.round_trip),
            ("chebyshev_slack", self.chebyshev_slack),
            ("monotonicity_slack", self.monotonicity_slack),
            ("root_residual", self.root_residual),
            ("closed_form", self.closed_form),
            ("martingale", self.martingale),
        ];
        for (name, v) in named {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::config(format!("tolerances.{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.wing_fraction > 0.0 && self.wing_fraction < 1.0) {
            return Err(CliError::config(format!(
                "tolerances.wing_fraction must lie in (0, 1), got {}",
                self.wing_fraction
            )));
        }
        if self.max_intervals == 0 {
            return Err(CliError::config("tolerances.max_intervals must be positive"));
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.maturities.is_empty() {
            return Err(CliError::config("maturities must not be empty"));
        }
        if let Some(t) = self.maturities.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(CliError::config(format!("maturities must be positive, got {t}")));
        }
        self.grids.k.validate("k", false)?;
        self.grids.x.validate("x", true)?;
        self.tolerances.validate()?;
        registry::ModelSpec::from_config(self)?;
        Ok(())
    }
}
