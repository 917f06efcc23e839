//! Wedge configuration and admissibility gatekeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};

fn default_epsilon() -> f64 {
    0.1
}
fn default_cap() -> f64 {
    0.05
}
fn default_sin_tol() -> f64 {
    1e-8
}

/// Wedge opening, weight exponent, and the numerical thresholds guarding the
/// resonance/admissibility conditions. Every solver entry point validates
/// through this type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WedgeConfig {
    /// Opening angle θ ∈ (0, (1−ε)π).
    pub theta: f64,
    /// Weight exponent α; must lie in I_ε and avoid the integers.
    pub alpha: f64,
    /// Resonance margin ε ∈ (0, 1).
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Cap on |α·θ| (the paper's small constant c).
    #[serde(default = "default_cap")]
    pub alpha_theta_cap: f64,
    /// Guard against near-poles of the trigonometric kernels.
    #[serde(default = "default_sin_tol")]
    pub sin_tolerance: f64,
    pub grid: GridSpec,
}

impl WedgeConfig {
    /// The admissible weight interval I_ε = [−(1−ε)π/θ + 1, (1−ε)π/θ − 1].
    pub fn i_eps(&self) -> (f64, f64) {
        let b = (1.0 - self.epsilon) * std::f64::consts::PI / self.theta;
        (-b + 1.0, b - 1.0)
    }

    /// The Helmholtz interval 𝕴_ε = [−(1−ε)π/θ, (1−ε)π/θ].
    pub fn frak_i_eps(&self) -> (f64, f64) {
        let b = (1.0 - self.epsilon) * std::f64::consts::PI / self.theta;
        (-b, b)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Admissibility(format!(
                "epsilon = {} outside (0,1)",
                self.epsilon
            )));
        }
        if !(self.theta > 0.0 && self.theta < (1.0 - self.epsilon) * std::f64::consts::PI) {
            return Err(Error::Admissibility(format!(
                "theta = {} outside (0, (1-eps)π) with eps = {}",
                self.theta, self.epsilon
            )));
        }
        let (lo, hi) = self.i_eps();
        if !(self.alpha >= lo && self.alpha <= hi) {
            return Err(Error::Admissibility(format!(
                "alpha = {} outside I_eps = [{lo}, {hi}]",
                self.alpha
            )));
        }
        if (self.alpha - self.alpha.round()).abs() < 1e-9 {
            return Err(Error::Admissibility(format!(
                "alpha = {} too close to an integer",
                self.alpha
            )));
        }
        if (self.alpha * self.theta).abs() >= self.alpha_theta_cap {
            return Err(Error::Admissibility(format!(
                "|alpha·theta| = {} exceeds cap {}",
                (self.alpha * self.theta).abs(),
                self.alpha_theta_cap
            )));
        }
        if !(self.sin_tolerance > 0.0) {
            return Err(Error::Admissibility("sin_tolerance must be > 0".into()));
        }
        Ok(())
    }

    /// Validate everything except the |αθ| cap (norm/audit paths don't need
    /// the coercivity smallness regime).
    pub fn validate_weight_only(&self) -> Result<()> {
        let mut relaxed = self.clone();
        relaxed.alpha_theta_cap = f64::INFINITY;
        relaxed.validate()
    }

    pub fn grid_obj(&self) -> Result<Grid> {
        Grid::new(self.grid.clone(), self.theta)
    }

    /// Check that a line abscissa stays clear of the free-slip resonances
    /// ±(π/θ − 1) and of the integer excluded by a margin.
    pub fn check_line_in_i_eps(&self, re_lambda: f64) -> Result<()> {
        let (lo, hi) = self.i_eps();
        if re_lambda < lo || re_lambda > hi {
            return Err(Error::Resonance(format!(
                "line Re λ = {re_lambda} outside I_eps = [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}
