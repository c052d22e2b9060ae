//! Flat TOML run configuration. Every key has a default; unknown keys are
//! rejected. Command-line flags override the file.

use std::path::{Path, PathBuf};

use copolymer_core::interface::InterfaceSettings;
use copolymer_core::varform::{FamilySettings, Strategy};
use copolymer_core::ModelParams;
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    /// Largest step count `uL` for exhaustive path counts.
    pub budget: usize,

    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub big_m: u32,
    pub m: u32,

    /// Slopes of the entropy grid.
    pub l_grid: Vec<f64>,
    /// Excess speeds `u − 1 − |l|` of the entropy grid.
    pub du_grid: Vec<f64>,
    pub entropy_ladder: Vec<usize>,
    pub oracle_max_width: usize,

    pub mu_max: f64,
    pub mu_step: f64,
    pub interface_ladder: Vec<usize>,
    pub interface_samples: usize,
    pub collapse_mus: Vec<f64>,

    pub n_columns: usize,
    pub band: i64,
    pub strategies: Vec<String>,

    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_points: usize,
    pub beta_points: usize,
    pub critical_alphas: Vec<f64>,

    pub collapse_slack: f64,
    pub ladder_gap: f64,
    pub derivative_rtol: f64,
    pub inverse_tol: f64,
    pub ordering_tol: f64,
    pub time_limit_secs: f64,
    /// Swap the stretch counter for one that drops the straight-path term.
    pub inject_mutation: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fam = FamilySettings::default();
        let iface = InterfaceSettings::default();
        Self {
            seed: 1,
            out: PathBuf::from("out"),
            budget: copolymer_core::oracle::DEFAULT_BUDGET,
            alpha: 2.0,
            beta: 1.0,
            p: 0.7,
            big_m: 2,
            m: 4,
            l_grid: vec![0.0, 0.25, 0.5, 1.0, 2.0],
            du_grid: vec![0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0],
            entropy_ladder: vec![8, 16, 32, 64],
            oracle_max_width: 4,
            mu_max: iface.mu_max,
            mu_step: iface.mu_step,
            interface_ladder: iface.ladder,
            interface_samples: iface.samples,
            collapse_mus: vec![1.5, 2.0, 3.0],
            n_columns: fam.n_columns,
            band: fam.band,
            strategies: fam.strategies.iter().map(Strategy::name).collect(),
            alpha_min: 0.5,
            alpha_max: 5.5,
            alpha_points: 21,
            beta_points: 21,
            critical_alphas: vec![0.5, 1.0, 2.0, 3.0, 4.0],
            collapse_slack: 0.05,
            ladder_gap: 0.05,
            derivative_rtol: 1e-6,
            inverse_tol: 1e-8,
            ordering_tol: 1e-9,
            time_limit_secs: 60.0,
            inject_mutation: false,
        }
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), ConfigError> {
        let bytes = std::fs::read(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes).map_err(|_| bad(format!("{} is not UTF-8", path.display())))?;
        Ok((Self::from_toml(text)?, bytes))
    }

    pub fn params(&self) -> Result<ModelParams, ConfigError> {
        ModelParams::new(self.alpha, self.beta, self.p, self.big_m, self.m).map_err(|e| bad(e.to_string()))
    }

    pub fn interface_settings(&self) -> InterfaceSettings {
        InterfaceSettings {
            mu_max: self.mu_max,
            mu_step: self.mu_step,
            ladder: self.interface_ladder.clone(),
            samples: self.interface_samples,
            seed: self.seed,
        }
    }

    pub fn family_settings(&self) -> Result<FamilySettings, ConfigError> {
        let strategies = self
            .strategies
            .iter()
            .map(|s| s.parse::<Strategy>().map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FamilySettings { n_columns: self.n_columns, band: self.band, strategies })
    }

    /// `(α, β)` scan points, row-major in `α`.
    pub fn scan_points(&self) -> Vec<(f64, f64)> {
        let step = |lo: f64, hi: f64, n: usize, i: usize| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut pts = Vec::with_capacity(self.alpha_points * self.beta_points);
        for i in 0..self.alpha_points {
            let alpha = step(self.alpha_min, self.alpha_max, self.alpha_points, i);
            for j in 0..self.beta_points {
                let t = step(-1.0, 1.0, self.beta_points, j);
                pts.push((alpha, alpha * t));
            }
        }
        pts
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params()?;
        self.family_settings()?;
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(bad(format!("{name} must be positive")))
            }
        };
        positive("mu_step", self.mu_step)?;
        positive("collapse_slack", self.collapse_slack)?;
        positive("ladder_gap", self.ladder_gap)?;
        positive("derivative_rtol", self.derivative_rtol)?;
        positive("inverse_tol", self.inverse_tol)?;
        positive("ordering_tol", self.ordering_tol)?;
        positive("time_limit_secs", self.time_limit_secs)?;
        if !(self.mu_max > 1.0) {
            return Err(bad("mu_max must exceed 1"));
        }
        for (name, ladder) in [("entropy_ladder", &self.entropy_ladder), ("interface_ladder", &self.interface_ladder)] {
            if ladder.is_empty() || ladder.contains(&0) || ladder.windows(2).any(|w| w[1] <= w[0]) {
                return Err(bad(format!("{name} must be a non-empty increasing list of positive widths")));
            }
        }
        if self.interface_ladder.len() > 3 {
            return Err(bad("interface_ladder holds at most three widths"));
        }
        if self.interface_samples < 2 {
            return Err(bad("interface_samples must be at least 2"));
        }
        if self.l_grid.is_empty() || self.du_grid.is_empty() {
            return Err(bad("entropy grids must be non-empty"));
        }
        if self.du_grid.iter().any(|&d| !(d > 0.0)) {
            return Err(bad("du_grid entries must be positive"));
        }
        if self.collapse_mus.iter().any(|&m| !(m > 1.0)) {
            return Err(bad("collapse_mus entries must exceed 1"));
        }
        if self.oracle_max_width == 0 {
            return Err(bad("oracle_max_width must be positive"));
        }
        if self.n_columns == 0 || self.band < 1 || self.strategies.is_empty() {
            return Err(bad("family needs columns, a positive band and at least one strategy"));
        }
        if self.alpha_points == 0
            || self.beta_points == 0
            || !(self.alpha_min >= 0.0)
            || self.alpha_max < self.alpha_min
        {
            return Err(bad("scan needs points and 0 <= alpha_min <= alpha_max"));
        }
        if self.critical_alphas.iter().any(|&a| !(a >= 0.0)) {
            return Err(bad("critical_alphas must be non-negative"));
        }
        Ok(())
    }
}
