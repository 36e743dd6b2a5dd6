//! Monte Carlo estimation of the Pickands constants `H_alpha`, the discrete
//! constant `H_{D,alpha}` and the two-index constant of the Pickands-grid
//! limit.
//!
//! All three are functionals of the drifted fractional Brownian motion
//! `B*(t) = sqrt(2) B_{alpha/2}(t) - t^alpha` on a window `[0, lambda]`.
//! One simulation records, per draw, the lattice maximum `A`, the grid
//! maximum `B` and a normaliser, so every constant (and every `(x, y)` of the
//! two-index table) is evaluated on common random numbers.
//!
//! Two estimators are available:
//!
//! * [`Estimator::PlainMean`] averages `exp(max B*) / lambda` directly. It is
//!   unbiased but its variance grows like `exp(lambda^2)` for `alpha = 2`
//!   and is unusable at the default windows.
//! * [`Estimator::ChangeOfMeasure`] (default) draws a lattice point `t_j`
//!   with probability proportional to its trapezoid weight, tilts the path by
//!   `exp(B*(t_j))`, which shifts it to
//!   `B*(s) + s^alpha + t_j^alpha - |s - t_j|^alpha`, and averages
//!   `W exp(max) / (lambda * sum_k w_k exp(B*(s_k)))`. The identity is exact
//!   on the lattice and each term is bounded by `W / (lambda * w_min)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{domain, Result};
use crate::gaussim::{FbmSampler, LatticeSpec};
use crate::rng::{stream, Stream, DOMAIN_PICKANDS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PickandsKind {
    Continuous,
    Grid,
    TwoIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    PlainMean,
    #[default]
    ChangeOfMeasure,
}

/// Window, lattice and replication settings of one estimation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PickandsSettings {
    pub lambda: f64,
    pub mesh: f64,
    pub n_rep: usize,
    #[serde(default)]
    pub estimator: Estimator,
}

impl PickandsSettings {
    pub const MIN_REPLICATIONS: usize = 100;

    /// `lambda = 50, mesh = 0.02` for `alpha <= 1`; `lambda = 20,
    /// mesh = 0.01` above.
    pub fn defaults_for(alpha: f64, n_rep: usize) -> Self {
        let (lambda, mesh) = if alpha <= 1.0 {
            (50.0, 0.02)
        } else {
            (20.0, 0.01)
        };
        Self {
            lambda,
            mesh,
            n_rep,
            estimator: Estimator::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(domain(format!(
                "window lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.mesh > 0.0 && self.mesh <= self.lambda) {
            return Err(domain(format!(
                "mesh must lie in (0, lambda], got {}",
                self.mesh
            )));
        }
        if self.n_rep < Self::MIN_REPLICATIONS {
            return Err(domain(format!(
                "need at least {} replications, got {}",
                Self::MIN_REPLICATIONS,
                self.n_rep
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PickandsEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Window actually simulated (the lattice span).
    pub lambda: f64,
    pub mesh: f64,
    pub n_rep: usize,
    pub kind: PickandsKind,
    pub estimator: Estimator,
    /// Grid spacing after snapping to the lattice (grid and two-index kinds).
    #[serde(rename = "D")]
    pub d: Option<f64>,
    /// 0.999-quantile of the per-draw integrand; a value far above `value`
    /// flags a heavy-tailed, unstable run.
    pub q999: f64,
}

/// One draw of the drifted field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftedFieldSample {
    pub lambda: f64,
    pub mesh: f64,
    pub cont_max: f64,
    pub grid_max: f64,
}

/// `B*` on a fixed lattice over `[0, lambda]`.
#[derive(Debug, Clone)]
pub struct DriftedField {
    alpha: f64,
    spec: LatticeSpec,
    sampler: FbmSampler,
    /// `(k * mesh)^alpha`
    powers: Vec<f64>,
}

impl DriftedField {
    pub fn new(alpha: f64, lambda: f64, mesh: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(domain(format!("alpha must lie in (0, 2], got {alpha}")));
        }
        let spec = LatticeSpec::covering(mesh, lambda)?;
        let sampler = FbmSampler::new(alpha / 2.0, spec)?;
        let powers = (0..spec.n_points)
            .map(|k| (k as f64 * mesh).powf(alpha))
            .collect();
        Ok(Self {
            alpha,
            spec,
            sampler,
            powers,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// Lattice stride of the grid `{k D}`.
    pub fn stride(&self, d: f64) -> Result<usize> {
        if !(d >= self.spec.mesh * (1.0 - 1e-9)) {
            return Err(domain(format!(
                "grid spacing D={d} is finer than the mesh {}",
                self.spec.mesh
            )));
        }
        Ok(((d / self.spec.mesh).round() as usize).max(1))
    }

    /// Path of `B*` on the lattice.
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let b = self.sampler.sample(rng).values;
        b.iter()
            .zip(&self.powers)
            .map(|(v, p)| SQRT_2 * v - p)
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, d: f64, rng: &mut R) -> Result<DriftedFieldSample> {
        let stride = self.stride(d)?;
        let path = self.sample_path(rng);
        let (cont_max, grid_max) = crate::chiproc::maxima_by_stride(&path, path.len() - 1, stride);
        Ok(DriftedFieldSample {
            lambda: self.spec.span(),
            mesh: self.spec.mesh,
            cont_max,
            grid_max,
        })
    }

    fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.spec.n_points {
            0.5 * self.spec.mesh
        } else {
            self.spec.mesh
        }
    }

    /// Lattice index with probability proportional to its trapezoid weight.
    fn tilt_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mesh = self.spec.mesh;
        let u: f64 = rng.random::<f64>() * self.spec.span();
        if u < 0.5 * mesh {
            0
        } else {
            (((u - 0.5 * mesh) / mesh).floor() as usize + 1).min(self.spec.n_points - 1)
        }
    }

    fn draw<R: Rng + ?Sized>(&self, estimator: Estimator, stride: usize, rng: &mut R) -> Draw {
        let b = self.sampler.sample(rng).values;
        let span = self.spec.span();
        match estimator {
            Estimator::PlainMean => {
                let path: Vec<f64> = b
                    .iter()
                    .zip(&self.powers)
                    .map(|(v, p)| SQRT_2 * v - p)
                    .collect();
                let (cont, grid) = crate::chiproc::maxima_by_stride(&path, path.len() - 1, stride);
                Draw {
                    cont,
                    grid,
                    ln_norm: span.ln(),
                }
            }
            Estimator::ChangeOfMeasure => {
                let j = self.tilt_index(rng);
                let pj = self.powers[j];
                let path: Vec<f64> = b
                    .iter()
                    .enumerate()
                    .map(|(k, v)| SQRT_2 * v + pj - self.powers[k.abs_diff(j)])
                    .collect();
                let (cont, grid) = crate::chiproc::maxima_by_stride(&path, path.len() - 1, stride);
                let sum: f64 = path
                    .iter()
                    .enumerate()
                    .map(|(k, v)| self.weight(k) * (v - cont).exp())
                    .sum();
                // W * exp(M) / (lambda * S) with W = lambda = span
                Draw {
                    cont,
                    grid,
                    ln_norm: cont + sum.ln(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Draw {
    cont: f64,
    grid: f64,
    ln_norm: f64,
}

/// Per-draw maxima of one estimation run; every constant is a sample mean
/// of `exp(f(A, B) - ln_norm)` for a suitable `f`.
#[derive(Debug, Clone)]
pub struct PickandsSimulation {
    alpha: f64,
    settings: PickandsSettings,
    lambda: f64,
    d: Option<f64>,
    draws: Vec<Draw>,
}

impl PickandsSimulation {
    /// Runs `settings.n_rep` draws in parallel; draw `i` uses stream
    /// `(seed, i)`, so the result does not depend on the thread count.
    pub fn run(alpha: f64, d: Option<f64>, settings: PickandsSettings, seed: u64) -> Result<Self> {
        settings.validate()?;
        let field = DriftedField::new(alpha, settings.lambda, settings.mesh)?;
        let stride = match d {
            Some(d) => field.stride(d)?,
            None => 1,
        };
        let draws: Vec<Draw> = (0..settings.n_rep as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng: Stream = stream(seed, DOMAIN_PICKANDS, i);
                field.draw(settings.estimator, stride, &mut rng)
            })
            .collect();
        Ok(Self {
            alpha,
            settings,
            lambda: field.spec().span(),
            d: d.map(|_| stride as f64 * settings.mesh),
            draws,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn settings(&self) -> &PickandsSettings {
        &self.settings
    }

    /// Snapped grid spacing, if a grid was requested.
    pub fn grid_spacing(&self) -> Option<f64> {
        self.d
    }

    fn estimate(&self, kind: PickandsKind, f: impl Fn(&Draw) -> f64) -> PickandsEstimate {
        let values: Vec<f64> = self
            .draws
            .iter()
            .map(|d| (f(d) - d.ln_norm).exp())
            .collect();
        let (value, stderr) = mean_and_stderr(&values);
        PickandsEstimate {
            value,
            stderr,
            lambda: self.lambda,
            mesh: self.settings.mesh,
            n_rep: values.len(),
            kind,
            estimator: self.settings.estimator,
            d: if kind == PickandsKind::Continuous {
                None
            } else {
                self.d
            },
            q999: quantile(values, 0.999),
        }
    }

    /// Estimate of `H_alpha(lambda) / lambda` from the lattice maximum.
    pub fn continuous(&self) -> PickandsEstimate {
        self.estimate(PickandsKind::Continuous, |d| d.cont)
    }

    /// Estimate of `H_{D,alpha}(lambda) / lambda`; `None` without a grid.
    pub fn grid(&self) -> Option<PickandsEstimate> {
        self.d
            .map(|_| self.estimate(PickandsKind::Grid, |d| d.grid))
    }

    /// Estimate of `H^{x,y}_{D,alpha_0}(lambda) / lambda^m`.
    ///
    /// The `m - 1` coordinates with exponent 2 enter as independent
    /// factors `E exp(max B*_1) / lambda`, whose large-window limit is
    /// exactly `pi^(-1/2)`; that limit is used, so only the `alpha`
    /// coordinate carries finite-window bias.
    pub fn two_index(&self, x: f64, y: f64, m: usize) -> PickandsEstimate {
        let degenerate = -0.5 * (m.max(1) - 1) as f64 * PI.ln();
        let mut e = self.estimate(PickandsKind::TwoIndex, |d| {
            (d.cont - x).min(d.grid - y) + degenerate
        });
        if self.d.is_none() {
            e.d = None;
        }
        e
    }

    /// `C(x, y) = pi^((m-1)/2) H^{ln H_alpha + x, ln H_{D,alpha} + y}`,
    /// with both Pickands constants estimated from the same draws. Returns
    /// `None` without a grid.
    pub fn pickands_term(&self, x: f64, y: f64) -> Option<TwoIndexEntry> {
        let grid = self.grid()?;
        let cont = self.continuous();
        let (sx, sy) = (x + cont.value.ln(), y + grid.value.ln());
        let e = self.estimate(PickandsKind::TwoIndex, |d| (d.cont - sx).min(d.grid - sy));
        Some(TwoIndexEntry {
            x,
            y,
            value: e.value,
            stderr: e.stderr,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoIndexEntry {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub stderr: f64,
}

/// Constants needed by the Pickands-grid limit, from one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickandsTable {
    pub h_alpha: PickandsEstimate,
    pub h_d_alpha: PickandsEstimate,
    pub entries: Vec<TwoIndexEntry>,
}

impl PickandsTable {
    pub fn lookup(&self, x: f64, y: f64) -> Option<&TwoIndexEntry> {
        self.entries.iter().find(|e| e.x == x && e.y == y)
    }
}

pub fn estimate_pickands_table(
    alpha: f64,
    d: f64,
    settings: PickandsSettings,
    seed: u64,
    points: &[(f64, f64)],
) -> Result<PickandsTable> {
    let sim = PickandsSimulation::run(alpha, Some(d), settings, seed)?;
    let entries = points
        .iter()
        .map(|&(x, y)| sim.pickands_term(x, y).expect("grid requested"))
        .collect();
    Ok(PickandsTable {
        h_alpha: sim.continuous(),
        h_d_alpha: sim.grid().expect("grid requested"),
        entries,
    })
}

/// Estimates `H_alpha` (no `d`) or `H_{D,alpha}` (with `d`) at a finite
/// window with the default estimator.
pub fn estimate_h(
    alpha: f64,
    lambda: f64,
    mesh: f64,
    n_rep: usize,
    d: Option<f64>,
    seed: u64,
) -> Result<PickandsEstimate> {
    let settings = PickandsSettings {
        lambda,
        mesh,
        n_rep,
        estimator: Estimator::default(),
    };
    let sim = PickandsSimulation::run(alpha, d, settings, seed)?;
    Ok(match d {
        Some(_) => sim.grid().expect("grid requested"),
        None => sim.continuous(),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn estimate_two_index(
    x: f64,
    y: f64,
    alpha: f64,
    m: usize,
    d: f64,
    lambda: f64,
    mesh: f64,
    n_rep: usize,
    seed: u64,
) -> Result<PickandsEstimate> {
    if m == 0 {
        return Err(domain("m must be at least 1"));
    }
    let settings = PickandsSettings {
        lambda,
        mesh,
        n_rep,
        estimator: Estimator::default(),
    };
    Ok(PickandsSimulation::run(alpha, Some(d), settings, seed)?.two_index(x, y, m))
}

/// Finite-window estimates at `lambda` and `2 lambda`; their difference is
/// a proxy for the window bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowBias {
    pub at_lambda: PickandsEstimate,
    pub at_double_lambda: PickandsEstimate,
    pub difference: f64,
}

pub fn window_bias(
    alpha: f64,
    d: Option<f64>,
    settings: PickandsSettings,
    seed: u64,
) -> Result<WindowBias> {
    let pick = |s: PickandsSimulation| {
        if d.is_some() {
            s.grid().expect("grid")
        } else {
            s.continuous()
        }
    };
    let at_lambda = pick(PickandsSimulation::run(alpha, d, settings, seed)?);
    let doubled = PickandsSettings {
        lambda: 2.0 * settings.lambda,
        ..settings
    };
    let at_double_lambda = pick(PickandsSimulation::run(alpha, d, doubled, seed)?);
    Ok(WindowBias {
        at_lambda,
        at_double_lambda,
        difference: at_double_lambda.value - at_lambda.value,
    })
}

/// Exact `E exp(sup_[0,lambda] B*_1) / lambda = 1/sqrt(pi) + 1/lambda` of
/// the degenerate exponent-2 field `sqrt(2) t Z - t^2`.
pub fn degenerate_window_constant(lambda: f64) -> f64 {
    1.0 / PI.sqrt() + 1.0 / lambda
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn quantile(mut values: Vec<f64>, q: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let idx = ((values.len() as f64 - 1.0) * q).round() as usize;
    values[idx]
}
