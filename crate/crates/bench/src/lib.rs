//! Fixtures shared by the benchmarks in `benches/`.

use chigrid::gaussim::{CorrelationModel, LatticeSpec, VectorSampler};
use chigrid::harness::lattice_mesh;

/// Lattice and sampler of an `m`-component experiment at horizon `t`
/// (`alpha = 1`, default mesh factor).
pub fn experiment_sampler(t: f64) -> VectorSampler {
    let mesh = lattice_mesh(0.05, t, 1.0);
    let spec = LatticeSpec::covering(mesh, t).expect("valid lattice");
    VectorSampler::new(CorrelationModel::exp_power(1.0).expect("valid model"), spec)
        .expect("embeddable")
}
