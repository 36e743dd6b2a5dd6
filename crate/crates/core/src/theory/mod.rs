//! Normalisation constants, tail asymptotics and limiting distributions of
//! the normalised (continuous, grid) chi maxima.

mod chi;
pub mod quad;

pub use chi::{chi_cdf, chi_pdf, chi_sf, ln_gamma_half, normal_cdf, normal_pdf};

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::chiproc::GridKind;
use crate::error::{domain, Error, Result};

/// Absolute tolerance of the mixture quadrature.
pub const MIXTURE_TOLERANCE: f64 = 1e-10;
/// Chi survival level at which the mixture integral is truncated.
pub const MIXTURE_TRUNCATION: f64 = 1e-12;
/// Slack allowed above the Frechet bound for an estimated Pickands term.
pub const FRECHET_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormConstants {
    pub a_t: f64,
    pub b_t: f64,
    pub b_delta_t: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub m: usize,
    pub alpha: f64,
    pub grid_kind: GridKind,
    pub h_alpha: f64,
    pub h_d_alpha: Option<f64>,
    pub delta: Option<f64>,
}

impl NormConstants {
    /// `(a_T (M_cont - b_T), a_T (M_grid - b_{delta,T}))`.
    pub fn normalize(&self, m_cont: f64, m_grid: f64) -> (f64, f64) {
        (
            self.a_t * (m_cont - self.b_t),
            self.a_t * (m_grid - self.b_delta_t),
        )
    }
}

/// `ln(2^(1-m/2) Gamma(m/2)^(-1) * factor * a^power)`.
fn log_chi_tail_coefficient(m: usize, ln_factor: f64, a: f64, power: f64) -> f64 {
    (1.0 - m as f64 / 2.0) * LN_2 - ln_gamma_half(m) + ln_factor + power * a.ln()
}

/// Normalising constants for a horizon `t`.
///
/// `h_d_alpha` is read only for the Pickands grid and `delta` only for the
/// sparse grid; the dense grid normalises both maxima by `b_T`.
pub fn norm_constants(
    t: f64,
    m: usize,
    alpha: f64,
    grid_kind: GridKind,
    h_alpha: f64,
    h_d_alpha: f64,
    delta: f64,
) -> Result<NormConstants> {
    if !(t > std::f64::consts::E && t.is_finite()) {
        return Err(domain(format!("T must exceed e, got {t}")));
    }
    if m == 0 {
        return Err(domain("m must be at least 1"));
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(domain(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    if !(h_alpha > 0.0 && h_alpha.is_finite()) {
        return Err(domain(format!("H_alpha must be positive, got {h_alpha}")));
    }
    let a_t = (2.0 * t.ln()).sqrt();
    let power = 2.0 / alpha + m as f64 - 2.0;
    let b_t = a_t + log_chi_tail_coefficient(m, h_alpha.ln(), a_t, power) / a_t;
    let (b_delta_t, h_d, d) = match grid_kind {
        GridKind::Pickands => {
            if !(h_d_alpha > 0.0 && h_d_alpha.is_finite()) {
                return Err(domain(format!(
                    "H_D_alpha must be positive, got {h_d_alpha}"
                )));
            }
            (
                a_t + log_chi_tail_coefficient(m, h_d_alpha.ln(), a_t, power) / a_t,
                Some(h_d_alpha),
                None,
            )
        }
        GridKind::Sparse => {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(domain(format!(
                    "sparse spacing must be positive, got {delta}"
                )));
            }
            (
                a_t + log_chi_tail_coefficient(m, -delta.ln(), a_t, m as f64 - 2.0) / a_t,
                None,
                Some(delta),
            )
        }
        GridKind::Dense => (b_t, None, None),
    };
    Ok(NormConstants {
        a_t,
        b_t,
        b_delta_t,
        t,
        m,
        alpha,
        grid_kind,
        h_alpha,
        h_d_alpha: h_d,
        delta: d,
    })
}

/// Tail approximation `P(sup_[0,T] chi_m > u)` for large `u`.
pub fn tail_asymptotic(u: f64, t: f64, m: usize, alpha: f64, h_alpha: f64) -> f64 {
    let power = 2.0 / alpha + m as f64 - 2.0;
    t * (log_chi_tail_coefficient(m, h_alpha.ln(), u, power) - 0.5 * u * u).exp()
}

/// Smallest half-integer `z` with chi survival below [`MIXTURE_TRUNCATION`].
fn truncation_point(m: usize) -> f64 {
    let mut z = (m as f64).sqrt();
    while chi_sf(z, m) >= MIXTURE_TRUNCATION {
        z += 0.5;
    }
    z
}

/// `E exp(-g exp(-r + sqrt(2r) chi_m))`.
pub fn mixture_expectation(g: f64, r: f64, m: usize) -> Result<f64> {
    if !(g >= 0.0) || !(r >= 0.0) || m == 0 {
        return Err(domain(format!(
            "mixture needs g >= 0, r >= 0, m >= 1 (got g={g}, r={r}, m={m})"
        )));
    }
    if g == 0.0 {
        return Ok(1.0);
    }
    if r == 0.0 {
        return Ok((-g).exp());
    }
    if g.is_infinite() {
        return Ok(0.0);
    }
    let s = (2.0 * r).sqrt();
    let z_max = truncation_point(m);
    let breaks: Vec<f64> = (1..8).map(|i| z_max * i as f64 / 8.0).collect();
    let integral = quad::integrate_with_breaks(
        |z| (-g * (-r + s * z).exp()).exp() * chi_pdf(z, m),
        0.0,
        z_max,
        &breaks,
        MIXTURE_TOLERANCE,
    )?;
    Ok(integral.value.clamp(0.0, 1.0))
}

/// Mixed Gumbel distribution function.
pub fn limit_marginal(x: f64, r: f64, m: usize) -> Result<f64> {
    mixture_expectation((-x).exp(), r, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSpec {
    pub m: usize,
    pub r: f64,
    pub grid_kind: GridKind,
    /// `pi^((m-1)/2) H^{ln H_alpha + x, ln H_{D,alpha} + y}` at the point
    /// being evaluated; read only for the Pickands grid.
    pub pickands_term: f64,
}

/// Limiting joint distribution function of the normalised maxima.
pub fn limit_joint(x: f64, y: f64, spec: &LimitSpec) -> Result<f64> {
    let (ex, ey) = ((-x).exp(), (-y).exp());
    match spec.grid_kind {
        GridKind::Sparse => mixture_expectation(ex + ey, spec.r, spec.m),
        GridKind::Dense => limit_marginal(x.min(y), spec.r, spec.m),
        GridKind::Pickands => {
            let term = spec.pickands_term;
            let bound = ex.min(ey);
            if !(term >= 0.0) {
                return Err(domain(format!(
                    "Pickands term must be nonnegative, got {term}"
                )));
            }
            if term > bound + FRECHET_SLACK {
                return Err(Error::FrechetViolation { term, bound });
            }
            mixture_expectation(ex + ey - term.min(bound), spec.r, spec.m)
        }
    }
}
