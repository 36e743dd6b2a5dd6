use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::CorrelationModel;
use crate::error::{domain, Error, Result};

/// Largest tolerated ratio of clipped negative eigenvalue mass to total mass.
pub const CLIP_TOLERANCE: f64 = 1e-8;
/// Number of times the circulant size is doubled before giving up.
pub const MAX_DOUBLINGS: u32 = 3;

/// Uniform lattice `{k * mesh : 0 <= k < n_points}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub mesh: f64,
    pub n_points: usize,
}

impl LatticeSpec {
    pub fn new(mesh: f64, n_points: usize) -> Result<Self> {
        if !(mesh > 0.0 && mesh.is_finite()) {
            return Err(domain(format!("lattice mesh must be positive, got {mesh}")));
        }
        if n_points < 2 {
            return Err(domain(format!(
                "lattice needs at least 2 points, got {n_points}"
            )));
        }
        Ok(Self { mesh, n_points })
    }

    /// Smallest lattice with the given mesh whose span reaches `horizon`.
    pub fn covering(mesh: f64, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(domain(format!("horizon must be positive, got {horizon}")));
        }
        let steps = (horizon / mesh * (1.0 - 1e-12)).ceil() as usize;
        Self::new(mesh, steps.max(1) + 1)
    }

    pub fn span(&self) -> f64 {
        (self.n_points - 1) as f64 * self.mesh
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.mesh
    }

    /// Index of the last lattice point at or before `t`.
    pub fn last_index_within(&self, t: f64) -> usize {
        let k = (t / self.mesh * (1.0 + 1e-12)).floor();
        (k.max(0.0) as usize).min(self.n_points - 1)
    }
}

/// Exact Gaussian sample path on a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePath {
    pub spec: LatticeSpec,
    pub values: Vec<f64>,
}

/// Circulant embedding of a stationary covariance sequence.
///
/// The eigenvalues are the DFT of the symmetrised sequence
/// `c_j = cov(min(j, N - j))`, clipped at zero.
#[derive(Clone)]
pub struct SpectralEmbedding {
    circulant_size: usize,
    n_points: usize,
    eigenvalues: Vec<f64>,
    clipped_mass: f64,
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralEmbedding")
            .field("circulant_size", &self.circulant_size)
            .field("n_points", &self.n_points)
            .field("clipped_mass", &self.clipped_mass)
            .finish_non_exhaustive()
    }
}

impl SpectralEmbedding {
    /// Embeds `cov(0), cov(1), ...` (lags in lattice steps) for `n_points`
    /// points, doubling the circulant up to [`MAX_DOUBLINGS`] times if the
    /// spectrum has too much negative mass.
    pub fn from_covariance(n_points: usize, cov: impl Fn(usize) -> f64) -> Result<Self> {
        if n_points == 0 {
            return Err(domain("embedding needs at least one point"));
        }
        let mut size = (2 * (n_points - 1)).max(2).next_power_of_two();
        let mut planner = FftPlanner::new();
        let mut last = None;
        for _ in 0..=MAX_DOUBLINGS {
            let fft = planner.plan_fft_forward(size);
            match Self::try_size(size, n_points, &cov, fft) {
                Ok(e) => return Ok(e),
                Err(err) => last = Some(err),
            }
            size *= 2;
        }
        Err(last.expect("at least one attempt"))
    }

    fn try_size(
        size: usize,
        n_points: usize,
        cov: &impl Fn(usize) -> f64,
        fft: Arc<dyn Fft<f64>>,
    ) -> Result<Self> {
        let mut buf: Vec<Complex64> = (0..size)
            .map(|j| Complex64::new(cov(j.min(size - j)), 0.0))
            .collect();
        fft.process(&mut buf);
        let total: f64 = buf.iter().map(|c| c.re.abs()).sum();
        let mut clipped_mass = 0.0;
        let eigenvalues: Vec<f64> = buf
            .iter()
            .map(|c| {
                if c.re < 0.0 {
                    clipped_mass -= c.re;
                    0.0
                } else {
                    c.re
                }
            })
            .collect();
        let clipped_fraction = if total > 0.0 {
            clipped_mass / total
        } else {
            0.0
        };
        if clipped_fraction > CLIP_TOLERANCE {
            return Err(Error::EmbeddingNotPsd {
                clipped_fraction,
                circulant_size: size,
            });
        }
        let n = size as f64;
        let scale = eigenvalues.iter().map(|&l| (l / n).sqrt()).collect();
        Ok(Self {
            circulant_size: size,
            n_points,
            eigenvalues,
            clipped_mass,
            scale,
            fft,
        })
    }

    pub fn circulant_size(&self) -> usize {
        self.circulant_size
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn clipped_mass(&self) -> f64 {
        self.clipped_mass
    }

    /// Two independent stationary sequences from one complex FFT: the real
    /// and imaginary parts of `F(sqrt(lambda / N) * (Z1 + i Z2))`.
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        let mut buf: Vec<Complex64> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        let first = buf[..self.n_points].iter().map(|c| c.re).collect();
        let second = buf[..self.n_points].iter().map(|c| c.im).collect();
        (first, second)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.sample_pair(rng).0
    }
}

pub fn build_embedding(model: &CorrelationModel, spec: &LatticeSpec) -> Result<SpectralEmbedding> {
    let mesh = spec.mesh;
    SpectralEmbedding::from_covariance(spec.n_points, |k| model.eval(k as f64 * mesh))
}

pub fn sample_path<R: Rng + ?Sized>(
    embedding: &SpectralEmbedding,
    spec: &LatticeSpec,
    rng: &mut R,
) -> LatticePath {
    debug_assert_eq!(embedding.n_points(), spec.n_points);
    LatticePath {
        spec: *spec,
        values: embedding.sample(rng),
    }
}
