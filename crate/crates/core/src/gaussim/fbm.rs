use rand::Rng;
use rand_distr::StandardNormal;

use super::{LatticePath, LatticeSpec, SpectralEmbedding};
use crate::error::{domain, Result};

/// Autocovariance of unit-step fractional Gaussian noise.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Reusable sampler of fractional Brownian motion on a fixed lattice.
///
/// Paths are cumulative sums of exactly simulated fractional Gaussian noise;
/// `hurst == 1` gives the degenerate line `t * Z`.
#[derive(Debug, Clone)]
pub struct FbmSampler {
    hurst: f64,
    spec: LatticeSpec,
    noise: Option<SpectralEmbedding>,
}

impl FbmSampler {
    pub fn new(hurst: f64, spec: LatticeSpec) -> Result<Self> {
        if !(hurst > 0.0 && hurst <= 1.0) {
            return Err(domain(format!(
                "Hurst index must lie in (0, 1], got {hurst}"
            )));
        }
        let noise = if hurst == 1.0 {
            None
        } else {
            Some(SpectralEmbedding::from_covariance(
                spec.n_points - 1,
                |k| fgn_autocovariance(hurst, k),
            )?)
        };
        Ok(Self { hurst, spec, noise })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LatticePath {
        let n = self.spec.n_points;
        let mesh = self.spec.mesh;
        let values = match &self.noise {
            None => {
                let z: f64 = rng.sample(StandardNormal);
                (0..n).map(|k| k as f64 * mesh * z).collect()
            }
            Some(noise) => {
                let step_scale = mesh.powf(self.hurst);
                let increments = noise.sample(rng);
                let mut values = Vec::with_capacity(n);
                let mut acc = 0.0;
                values.push(0.0);
                for inc in increments {
                    acc += step_scale * inc;
                    values.push(acc);
                }
                values
            }
        };
        LatticePath {
            spec: self.spec,
            values,
        }
    }
}

pub fn sample_fbm<R: Rng + ?Sized>(
    hurst: f64,
    n_points: usize,
    mesh: f64,
    rng: &mut R,
) -> Result<LatticePath> {
    let spec = LatticeSpec::new(mesh, n_points)?;
    Ok(FbmSampler::new(hurst, spec)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, DOMAIN_DIAGNOSTIC};

    #[test]
    fn autocovariance_brownian_is_white() {
        assert_eq!(fgn_autocovariance(0.5, 0), 1.0);
        for k in 1..10 {
            assert!(fgn_autocovariance(0.5, k).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_line() {
        let p = sample_fbm(1.0, 11, 0.1, &mut stream(3, DOMAIN_DIAGNOSTIC, 0)).unwrap();
        assert_eq!(p.values[0], 0.0);
        let unit = p.values[10];
        for (k, v) in p.values.iter().enumerate() {
            assert!((v - k as f64 * 0.1 * unit).abs() < 1e-12);
        }
    }

    #[test]
    fn starts_at_zero_with_right_length() {
        for h in [0.2, 0.5, 0.8] {
            let p = sample_fbm(h, 50, 0.02, &mut stream(9, DOMAIN_DIAGNOSTIC, 1)).unwrap();
            assert_eq!(p.values.len(), 50);
            assert_eq!(p.values[0], 0.0);
        }
        // a single increment still works
        let p = sample_fbm(0.3, 2, 0.5, &mut stream(9, DOMAIN_DIAGNOSTIC, 2)).unwrap();
        assert_eq!(p.values.len(), 2);
    }

    #[test]
    fn rejects_bad_hurst() {
        let mut rng = stream(0, DOMAIN_DIAGNOSTIC, 0);
        assert!(sample_fbm(0.0, 10, 0.1, &mut rng).is_err());
        assert!(sample_fbm(1.2, 10, 0.1, &mut rng).is_err());
    }
}
