//! Gaussian temporal mode of the input wavepacket.
//!
//! All photons share one real mode
//! `g(t) = √μ (2π)^(-1/4) exp(-μ²(t - t̄)²/4)`, normalised so that
//! `∫ |g|² dt = 1`. Times are in units of Γ⁻¹ and `μ` in units of Γ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianPulse {
    pub mu: f64,
    pub t_bar: f64,
}

impl GaussianPulse {
    pub fn new(mu: f64, t_bar: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter { name: "pulse.mu", reason: format!("must be > 0, got {mu}") });
        }
        if !t_bar.is_finite() {
            return Err(Error::InvalidParameter { name: "pulse.t_bar", reason: "must be finite".into() });
        }
        Ok(Self { mu, t_bar })
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        let x = t - self.t_bar;
        self.mu.sqrt() * (2.0 * std::f64::consts::PI).powf(-0.25) * (-self.mu * self.mu * x * x / 4.0).exp()
    }

    pub fn intensity(&self, t: f64) -> f64 {
        let g = self.amplitude(t);
        g * g
    }

    /// Samples `(t, |g(t)|²)` on a monotone grid.
    pub fn profile(&self, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
        if grid.is_empty() {
            return Err(Error::Empty);
        }
        if grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter { name: "grid", reason: "must be monotone".into() });
        }
        Ok(grid.iter().map(|&t| (t, self.intensity(t))).collect())
    }
}

impl Default for GaussianPulse {
    /// `μ = 1.46 Γ`, `t̄ = 5 Γ⁻¹`.
    fn default() -> Self {
        Self { mu: 1.46, t_bar: 5.0 }
    }
}
