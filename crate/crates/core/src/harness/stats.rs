//! Empirical distribution functions and Kolmogorov-Smirnov statistics.

use serde::{Deserialize, Serialize};

/// Normalised pair `(a_T (M_cont - b_T), a_T (M_grid - b_{delta,T}))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPair {
    pub cont: f64,
    pub grid: f64,
}

/// `F(x, y)` = fraction of samples with `cont <= x` and `grid <= y`, one
/// entry per evaluation point.
pub fn empirical_joint_cdf(samples: &[NormalizedPair], eval_points: &[[f64; 2]]) -> Vec<f64> {
    let n = samples.len() as f64;
    eval_points
        .iter()
        .map(|&[x, y]| {
            samples
                .iter()
                .filter(|s| s.cont <= x && s.grid <= y)
                .count() as f64
                / n
        })
        .collect()
}

/// Fraction of `values` at or below `x`.
pub fn empirical_cdf(values: &[f64], x: f64) -> f64 {
    values.iter().filter(|&&v| v <= x).count() as f64 / values.len() as f64
}

/// One-sample statistic `sup_x |F_n(x) - F(x)|` against a continuous `cdf`.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Two-sample statistic `sup_x |F_n(x) - G_m(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Kolmogorov survival function `Q(t) = 2 sum (-1)^(k-1) exp(-2 k^2 t^2)`.
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * t * t).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of the two-sample statistic `d` (with the usual
/// small-sample correction of the scaling).
pub fn ks_two_sample_pvalue(d: f64, na: usize, nb: usize) -> f64 {
    let en = ((na * nb) as f64 / (na + nb) as f64).sqrt();
    kolmogorov_sf((en + 0.12 + 0.11 / en) * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(f64, f64)]) -> Vec<NormalizedPair> {
        v.iter()
            .map(|&(cont, grid)| NormalizedPair { cont, grid })
            .collect()
    }

    #[test]
    fn joint_cdf_counting() {
        let s = pairs(&[(0.0, 0.0)]);
        assert_eq!(empirical_joint_cdf(&s, &[[1.0, 1.0]]), vec![1.0]);
        assert_eq!(empirical_joint_cdf(&s, &[[-1e6, -1e6]]), vec![0.0]);
        let s = pairs(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        assert!((empirical_joint_cdf(&s, &[[1.0, 1.0]])[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ks_against_uniform() {
        let v: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let d = ks_statistic(&v, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.05).abs() < 1e-12);
    }

    #[test]
    fn two_sample_brute_force() {
        let a = [0.1, 0.4, 0.45, 0.9, 1.3];
        let b = [0.2, 0.4, 0.5, 0.6, 0.7, 2.0];
        let grid: Vec<f64> = a.iter().chain(&b).copied().collect();
        let brute = grid
            .iter()
            .map(|&x| (empirical_cdf(&a, x) - empirical_cdf(&b, x)).abs())
            .fold(0.0, f64::max);
        assert!((ks_two_sample(&a, &b) - brute).abs() < 1e-15);
        assert_eq!(ks_two_sample(&a, &a), 0.0);
    }

    #[test]
    fn kolmogorov_reference_points() {
        // Q(1.36) ~ 0.049, Q(1.63) ~ 0.0098 (classical critical values)
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 5e-4);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }
}
