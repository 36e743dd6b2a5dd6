//! Exact synthesis of stationary Gaussian lattice paths and fractional
//! Brownian motion.

mod correlation;
mod embedding;
mod fbm;

pub use correlation::{eval_correlation, CorrelationFamily, CorrelationModel};
pub use embedding::{
    build_embedding, sample_path, LatticePath, LatticeSpec, SpectralEmbedding, CLIP_TOLERANCE,
    MAX_DOUBLINGS,
};
pub use fbm::{fgn_autocovariance, sample_fbm, FbmSampler};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// `m` Gaussian components sharing one lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorChiInput {
    pub spec: LatticeSpec,
    pub components: Vec<LatticePath>,
    /// Per-component constant Gaussian draws of the strong-mixture construction.
    pub shared_z: Option<Vec<f64>>,
}

impl VectorChiInput {
    pub fn m(&self) -> usize {
        self.components.len()
    }

    /// Builds an input from raw component values (all of the same length).
    pub fn from_components(spec: LatticeSpec, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(domain("need at least one component"));
        }
        if components.iter().any(|c| c.len() != spec.n_points) {
            return Err(domain("component length differs from the lattice size"));
        }
        Ok(Self {
            spec,
            components: components
                .into_iter()
                .map(|values| LatticePath { spec, values })
                .collect(),
            shared_z: None,
        })
    }
}

/// Draws vector inputs for one correlation model; the embedding is built
/// once and shared across draws (and threads).
#[derive(Debug, Clone)]
pub struct VectorSampler {
    model: CorrelationModel,
    spec: LatticeSpec,
    embedding: SpectralEmbedding,
}

impl VectorSampler {
    pub fn new(model: CorrelationModel, spec: LatticeSpec) -> Result<Self> {
        // The strong mixture is sampled as sqrt(1-rho) Y + sqrt(rho) Z with
        // Y drawn from the local (ExpPower) part.
        let embedding = build_embedding(&model.local_part(), &spec)?;
        Ok(Self {
            model,
            spec,
            embedding,
        })
    }

    pub fn model(&self) -> &CorrelationModel {
        &self.model
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn embedding(&self) -> &SpectralEmbedding {
        &self.embedding
    }

    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<VectorChiInput> {
        if m == 0 {
            return Err(domain("m must be at least 1"));
        }
        let mut raw = Vec::with_capacity(m);
        while raw.len() < m {
            let (a, b) = self.embedding.sample_pair(rng);
            raw.push(a);
            if raw.len() < m {
                raw.push(b);
            }
        }
        let shared_z = match self.model.family {
            CorrelationFamily::ExpPower => None,
            CorrelationFamily::StrongMixture => {
                let rho = self.model.rho();
                let (a, b) = ((1.0 - rho).sqrt(), rho.sqrt());
                let z: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
                for (values, &zi) in raw.iter_mut().zip(&z) {
                    for v in values.iter_mut() {
                        *v = a * *v + b * zi;
                    }
                }
                Some(z)
            }
        };
        let mut input = VectorChiInput::from_components(self.spec, raw)?;
        input.shared_z = shared_z;
        Ok(input)
    }
}

pub fn sample_vector_chi_input<R: Rng + ?Sized>(
    model: &CorrelationModel,
    spec: &LatticeSpec,
    m: usize,
    rng: &mut R,
) -> Result<VectorChiInput> {
    VectorSampler::new(*model, *spec)?.sample(m, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, DOMAIN_DIAGNOSTIC};

    #[test]
    fn shapes() {
        let spec = LatticeSpec::new(0.1, 30).unwrap();
        let strong = CorrelationModel::strong_mixture(1.0, 0.5, 100.0).unwrap();
        let x = sample_vector_chi_input(&strong, &spec, 1, &mut stream(0, DOMAIN_DIAGNOSTIC, 0))
            .unwrap();
        assert_eq!(x.m(), 1);
        assert_eq!(x.shared_z.as_ref().unwrap().len(), 1);
        let weak = CorrelationModel::exp_power(1.0).unwrap();
        let x =
            sample_vector_chi_input(&weak, &spec, 3, &mut stream(0, DOMAIN_DIAGNOSTIC, 0)).unwrap();
        assert_eq!(x.m(), 3);
        assert!(x.shared_z.is_none());
        assert!(x
            .components
            .iter()
            .all(|c| c.spec == spec && c.values.len() == 30));
        assert!(
            sample_vector_chi_input(&weak, &spec, 0, &mut stream(0, DOMAIN_DIAGNOSTIC, 0)).is_err()
        );
    }

    #[test]
    fn zero_r_mixture_reduces_to_local_paths() {
        let spec = LatticeSpec::new(0.1, 64).unwrap();
        let strong = CorrelationModel::strong_mixture(1.0, 0.0, 100.0).unwrap();
        let weak = CorrelationModel::exp_power(1.0).unwrap();
        let a = sample_vector_chi_input(&strong, &spec, 2, &mut stream(5, DOMAIN_DIAGNOSTIC, 0))
            .unwrap();
        let b =
            sample_vector_chi_input(&weak, &spec, 2, &mut stream(5, DOMAIN_DIAGNOSTIC, 0)).unwrap();
        assert_eq!(a.components, b.components);
    }
}
