use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interaction strengths, block density and the two vertical caps.
///
/// `big_m` bounds the block-scale vertical displacement per column and `m` bounds
/// the number of steps per unit width spent in a column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub big_m: u32,
    pub m: u32,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, p: f64, big_m: u32, m: u32) -> Result<Self> {
        let params = Self { alpha, beta, p, big_m, m };
        params.validate()?;
        Ok(params)
    }

    /// Parameters with the smallest admissible caps for a given `M`.
    pub fn with_default_caps(alpha: f64, beta: f64, p: f64) -> Result<Self> {
        Self::new(alpha, beta, p, 2, 4)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(Error::InvalidParams("energies must be finite".into()));
        }
        if self.alpha < self.beta.abs() {
            return Err(Error::InvalidParams(format!(
                "alpha = {} must dominate |beta| = {}",
                self.alpha,
                self.beta.abs()
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParams(format!("p = {} outside [0,1]", self.p)));
        }
        if self.big_m < 1 {
            return Err(Error::InvalidParams("M must be at least 1".into()));
        }
        if self.m < self.big_m + 2 {
            return Err(Error::InvalidParams(format!("m = {} must be at least M + 2 = {}", self.m, self.big_m + 2)));
        }
        Ok(())
    }

    /// Energy shift per step spent in the B-solvent.
    pub fn b_shift(&self) -> f64 {
        (self.beta - self.alpha) / 2.0
    }
}
