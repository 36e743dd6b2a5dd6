use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationFamily {
    /// `exp(-|t|^alpha)`.
    ExpPower,
    /// `(1 - rho) exp(-|t|^alpha) + rho` with `rho = r / ln(horizon)`.
    StrongMixture,
}

/// Stationary correlation function with local exponent `alpha` and, for the
/// strong-mixture family, long-range parameter `r` at horizon `horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationModel {
    pub family: CorrelationFamily,
    pub alpha: f64,
    pub r: f64,
    pub horizon: f64,
}

impl CorrelationModel {
    pub fn exp_power(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            family: CorrelationFamily::ExpPower,
            alpha,
            r: 0.0,
            horizon: f64::INFINITY,
        })
    }

    /// Triangular-array family: at each horizon `T` the correlation is mixed
    /// with a constant so that `r(T) ln T -> r`.
    pub fn strong_mixture(alpha: f64, r: f64, horizon: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err(domain(format!(
                "long-range parameter r must be finite and >= 0, got {r}"
            )));
        }
        if !(horizon > 1.0 && horizon.is_finite()) {
            return Err(domain(format!("horizon must exceed 1, got {horizon}")));
        }
        let rho = r / horizon.ln();
        if rho >= 1.0 {
            return Err(domain(format!("mixing weight r/ln T = {rho} must be < 1")));
        }
        Ok(Self {
            family: CorrelationFamily::StrongMixture,
            alpha,
            r,
            horizon,
        })
    }

    /// Weight of the shared constant component; zero for `ExpPower`.
    pub fn rho(&self) -> f64 {
        match self.family {
            CorrelationFamily::ExpPower => 0.0,
            CorrelationFamily::StrongMixture => self.r / self.horizon.ln(),
        }
    }

    /// The `ExpPower` model with the same local exponent.
    pub fn local_part(&self) -> Self {
        Self {
            family: CorrelationFamily::ExpPower,
            alpha: self.alpha,
            r: 0.0,
            horizon: f64::INFINITY,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let base = (-t.abs().powf(self.alpha)).exp();
        match self.family {
            CorrelationFamily::ExpPower => base,
            CorrelationFamily::StrongMixture => {
                let rho = self.rho();
                (1.0 - rho) * base + rho
            }
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(domain(format!("alpha must lie in (0, 2], got {alpha}")))
    }
}

pub fn eval_correlation(model: &CorrelationModel, t: f64) -> f64 {
    model.eval(t)
}
