//! Law of the chi variable with `m` degrees of freedom.

use libm::{erf, erfc, lgamma};
use std::f64::consts::{LN_2, SQRT_2};

/// `ln Gamma(m / 2)`.
pub fn ln_gamma_half(m: usize) -> f64 {
    lgamma(m as f64 / 2.0)
}

/// Density `2^(1-m/2) z^(m-1) e^(-z^2/2) / Gamma(m/2)` for `z >= 0`.
pub fn chi_pdf(z: f64, m: usize) -> f64 {
    if z < 0.0 {
        return 0.0;
    }
    let mf = m as f64;
    if z == 0.0 {
        return if m == 1 {
            (2.0 / std::f64::consts::PI).sqrt()
        } else {
            0.0
        };
    }
    ((1.0 - mf / 2.0) * LN_2 + (mf - 1.0) * z.ln() - 0.5 * z * z - ln_gamma_half(m)).exp()
}

/// Finite-series part of the chi law for integer `m`:
/// `P(chi_m > z) = [erfc(z / sqrt 2) if m odd] + chi_series(z, m)`.
fn chi_series(z: f64, m: usize) -> f64 {
    let x = 0.5 * z * z;
    let mut sum = 0.0;
    if m.is_multiple_of(2) {
        // e^-x sum_{j < m/2} x^j / j!
        let mut term = 1.0;
        for j in 0..m / 2 {
            if j > 0 {
                term *= x / j as f64;
            }
            sum += term;
        }
    } else {
        // e^-x sum_{j < (m-1)/2} x^(j+1/2) / Gamma(j + 3/2)
        let mut term = x.sqrt() / (std::f64::consts::PI.sqrt() / 2.0);
        for j in 0..(m - 1) / 2 {
            if j > 0 {
                term *= x / (j as f64 + 0.5);
            }
            sum += term;
        }
    }
    (-x).exp() * sum
}

/// Distribution function, by the closed-form finite series for integer `m`.
pub fn chi_cdf(z: f64, m: usize) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let head = if m.is_multiple_of(2) {
        1.0
    } else {
        erf(z / SQRT_2)
    };
    (head - chi_series(z, m)).clamp(0.0, 1.0)
}

pub fn chi_sf(z: f64, m: usize) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    let head = if m.is_multiple_of(2) {
        0.0
    } else {
        erfc(z / SQRT_2)
    };
    (head + chi_series(z, m)).clamp(0.0, 1.0)
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::quad::integrate;

    #[test]
    fn rayleigh_and_folded_normal() {
        for z in [0.1, 0.5, 1.0, 2.0, 3.5] {
            assert!((chi_cdf(z, 2) - (1.0 - (-z * z / 2.0).exp())).abs() < 1e-14);
            assert!((chi_cdf(z, 1) - (2.0 * normal_cdf(z) - 1.0)).abs() < 1e-14);
            assert!((chi_cdf(z, 3) + chi_sf(z, 3) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cdf_matches_density_quadrature() {
        for m in 1..=5 {
            for z in [0.3, 1.0, 2.4] {
                let q = integrate(|s| chi_pdf(s, m), 0.0, z, 1e-13).unwrap().value;
                assert!((q - chi_cdf(z, m)).abs() < 1e-12, "m={m} z={z}");
            }
        }
        // frozen: m=3, z=1, computed by the quadrature oracle above
        let q = integrate(|s| chi_pdf(s, 3), 0.0, 1.0, 1e-14).unwrap().value;
        assert!((q - 0.198_748_043_098_799).abs() < 1e-12);
    }

    #[test]
    fn monotone_from_zero_to_one() {
        for m in 1..=4 {
            let mut prev = 0.0;
            assert_eq!(chi_cdf(0.0, m), 0.0);
            for i in 1..200 {
                let c = chi_cdf(i as f64 * 0.05, m);
                assert!(c >= prev);
                prev = c;
            }
            assert!(chi_cdf(12.0, m) > 1.0 - 1e-14);
        }
    }

    #[test]
    fn survival_matches_tail_quadrature() {
        for m in 1..=7 {
            for z in [0.2, 0.9, 1.7, 3.0, 6.0] {
                let q = integrate(|s| chi_pdf(s, m), z, z + 40.0, 1e-14)
                    .unwrap()
                    .value;
                assert!((chi_sf(z, m) - q).abs() < 1e-13, "m={m} z={z}");
            }
        }
        // deep tail keeps relative accuracy
        assert!((chi_sf(10.0, 2) / (-50f64).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_values() {
        assert!((ln_gamma_half(1) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!(ln_gamma_half(2).abs() < 1e-15);
        assert!((ln_gamma_half(6) - 2f64.ln()).abs() < 1e-14);
    }
}
