//! Simulation of chi-process maxima over continuous time and uniform grids.
//!
//! The crate is organised bottom-up:
//!
//! * [`gaussim`] synthesises exact stationary Gaussian lattice paths by
//!   circulant embedding, plus fractional Brownian motion.
//! * [`chiproc`] turns vector Gaussian paths into chi-process paths and
//!   extracts the continuous-time (fine lattice) and grid maxima.
//! * [`theory`] holds normalisation constants, chi-distribution utilities
//!   and the limiting joint distribution functions.
//! * [`pickands`] estimates the Pickands-type constants by Monte Carlo.
//! * [`harness`] wires everything into seeded, parallel experiments with
//!   deterministic on-disk outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chiproc;
pub mod error;
pub mod gaussim;
pub mod harness;
pub mod pickands;
pub mod rng;
pub mod theory;

pub use chiproc::{
    chi_path, grid_spacing, maxima_pair, ChiPath, GridKind, GridSpacing, GridSpec, MaximaPair,
};
pub use error::{Error, Result};
pub use gaussim::{
    build_embedding, eval_correlation, sample_fbm, sample_path, sample_vector_chi_input,
    CorrelationFamily, CorrelationModel, LatticePath, LatticeSpec, SpectralEmbedding,
    VectorChiInput,
};
pub use harness::{
    empirical_joint_cdf, parse_config, run_experiment, write_outputs, ComparisonReport,
    ExperimentConfig, NormalizedPair, ReplicationResult,
};
pub use pickands::{estimate_h, estimate_two_index, PickandsEstimate};
pub use rng::Stream;
pub use theory::{
    limit_joint, limit_marginal, mixture_expectation, norm_constants, LimitSpec, NormConstants,
};
