use serde::Deserialize;
use std::path::{Path, PathBuf};

use crate::distributions::{Budgets, Target};
use crate::error::{Error, Result};
use crate::systems::SystemSpec;

/// Sweep description read from a TOML file with `[system]`, `[sweep]`,
/// `[budgets]` and an optional `[smoothing]` section.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub system: SystemSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub budgets: BudgetSection,
    #[serde(default)]
    pub smoothing: Option<SmoothingSection>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    /// Catalog name such as `trigonometric` or `iid-uniform`.
    pub spec: String,
    /// Covariance eigenvalues for `gaussian-anisotropic`, one per coordinate;
    /// only valid with a single n.
    #[serde(default)]
    pub eigenvalues: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub n: Vec<usize>,
    pub target: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub theta: usize,
    pub per_theta: usize,
    pub radial: usize,
}

impl Default for BudgetSection {
    fn default() -> Self {
        let b = Budgets::default();
        BudgetSection { theta: b.theta, per_theta: b.per_theta, radial: b.radial }
    }
}

/// Optional smoothing-inequality terms per n. Window defaults are
/// `T₀ = 5√(log n)` and `T = 5n`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingSection {
    #[serde(default)]
    pub t0: Option<f64>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_smoothing_theta")]
    pub theta: usize,
    #[serde(default = "default_smoothing_samples")]
    pub samples: usize,
}

fn default_points() -> usize {
    512
}

fn default_smoothing_theta() -> usize {
    16
}

fn default_smoothing_samples() -> usize {
    20_000
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let ns = &self.sweep.n;
        if ns.is_empty() {
            return Err(Error::config("sweep.n must list at least one dimension"));
        }
        if ns.iter().any(|&n| n < 8) {
            return Err(Error::config("every sweep dimension must be at least 8"));
        }
        if ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("sweep.n must be strictly increasing"));
        }
        let b = &self.budgets;
        if b.theta < 2 || b.per_theta < 2 || b.radial == 0 {
            return Err(Error::config("budgets must be positive, with at least 2 directions and 2 samples"));
        }
        self.target()?;
        for &n in ns {
            self.spec(n)?;
        }
        if let Some(s) = &self.smoothing {
            if s.points < 2 || s.theta == 0 || s.samples < 100 {
                return Err(Error::config("smoothing needs points ≥ 2, theta ≥ 1 and samples ≥ 100"));
            }
            if let (Some(t0), Some(t)) = (s.t0, s.t) {
                if !(t0 > 0.0 && t >= t0) {
                    return Err(Error::config("smoothing window needs t ≥ t0 > 0"));
                }
            }
        }
        Ok(())
    }

    pub fn target(&self) -> Result<Target> {
        Target::from_name(&self.sweep.target)
    }

    pub fn budgets(&self) -> Budgets {
        Budgets { theta: self.budgets.theta, per_theta: self.budgets.per_theta, radial: self.budgets.radial }
    }

    /// The system at dimension n.
    pub fn spec(&self, n: usize) -> Result<SystemSpec> {
        match (&self.system.eigenvalues, self.system.spec.as_str()) {
            (Some(eig), "gaussian-anisotropic") => {
                if eig.len() != n {
                    return Err(Error::config(format!("{} eigenvalues given for n = {n}", eig.len())));
                }
                SystemSpec::gaussian_anisotropic(eig.clone())
            }
            (Some(_), other) => Err(Error::config(format!("eigenvalues are not a parameter of `{other}`"))),
            (None, name) => SystemSpec::from_name(name, n),
        }
    }
}
