use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use super::config::{ConstantsSource, ExperimentConfig};
use super::stats::{empirical_cdf, empirical_joint_cdf, ks_statistic, NormalizedPair};
use crate::chiproc::{
    chi_path, grid_spacing, maxima_by_stride, maxima_with_spacing, GridKind, GridSpacing, GridSpec,
    MaximaPair,
};
use crate::error::{Error, Result};
use crate::gaussim::{CorrelationModel, LatticeSpec, VectorSampler};
use crate::pickands::{
    estimate_pickands_table, PickandsEstimate, PickandsSimulation, PickandsTable,
};
use crate::rng::{stream, DOMAIN_REPLICATION};
use crate::theory::{limit_joint, limit_marginal, norm_constants, LimitSpec, NormConstants};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub index: usize,
    pub pair: MaximaPair,
    pub normalized: NormalizedPair,
}

/// Everything derived from a config before any path is drawn.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub config: ExperimentConfig,
    pub model: CorrelationModel,
    pub lattice: LatticeSpec,
    pub spacing: GridSpacing,
}

/// Lattice mesh `eta (2 ln T)^(-1/alpha)`.
pub fn lattice_mesh(eta: f64, t: f64, alpha: f64) -> f64 {
    eta * (2.0 * t.ln()).powf(-1.0 / alpha)
}

impl ExperimentPlan {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let model = if config.r > 0.0 {
            CorrelationModel::strong_mixture(config.alpha, config.r, config.t)?
        } else {
            CorrelationModel::exp_power(config.alpha)?
        };
        let mesh = lattice_mesh(config.eta, config.t, config.alpha);
        let lattice = LatticeSpec::covering(mesh, config.t)?;
        let spacing = grid_spacing(&config.grid, config.t, config.alpha, mesh)?;
        Ok(Self {
            config: config.clone(),
            model,
            lattice,
            spacing,
        })
    }

    /// Grid constant `D` implied by the snapped spacing.
    pub fn effective_d(&self) -> f64 {
        self.spacing.delta_used * (2.0 * self.config.t.ln()).powf(1.0 / self.config.alpha)
    }

    /// Maxima of every replication, in replication order. Replication `i`
    /// draws from stream `(master_seed, i)` only.
    pub fn simulate(&self) -> Result<Vec<MaximaPair>> {
        let sampler = VectorSampler::new(self.model, self.lattice)?;
        let c = &self.config;
        (0..c.n_rep)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(c.master_seed, DOMAIN_REPLICATION, i as u64);
                let input = sampler.sample(c.m, &mut rng)?;
                Ok(maxima_with_spacing(&chi_path(&input), &self.spacing, c.t))
            })
            .collect()
    }
}

/// Pickands constants used for normalisation and for the limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConstants {
    pub source: ConstantsSource,
    #[serde(rename = "H_alpha")]
    pub h_alpha: f64,
    #[serde(rename = "H_D_alpha")]
    pub h_d_alpha: Option<f64>,
    /// Pickands-grid term per eval point (same order as the config).
    pub pickands_term: Option<Vec<f64>>,
    /// Monte Carlo estimates behind the values, when estimated.
    pub h_alpha_estimate: Option<PickandsEstimate>,
    pub h_d_alpha_estimate: Option<PickandsEstimate>,
    pub pickands_term_stderr: Option<Vec<f64>>,
}

pub fn resolve_constants(plan: &ExperimentPlan) -> Result<ResolvedConstants> {
    let c = &plan.config;
    let kind = c.grid.kind();
    match c.constants_source {
        ConstantsSource::Provided => {
            let h_alpha = c.h_alpha.expect("validated");
            let (h_d_alpha, pickands_term) = if kind == GridKind::Pickands {
                let table = c.pickands_term.as_ref().expect("validated");
                let terms = c
                    .eval_points
                    .iter()
                    .map(|p| {
                        table
                            .iter()
                            .find(|e| e.x == p[0] && e.y == p[1])
                            .expect("validated")
                            .value
                    })
                    .collect();
                (c.h_d_alpha, Some(terms))
            } else {
                (None, None)
            };
            Ok(ResolvedConstants {
                source: ConstantsSource::Provided,
                h_alpha,
                h_d_alpha,
                pickands_term,
                h_alpha_estimate: None,
                h_d_alpha_estimate: None,
                pickands_term_stderr: None,
            })
        }
        ConstantsSource::Estimate => {
            let settings = c.pickands_settings();
            if kind == GridKind::Pickands {
                let points: Vec<(f64, f64)> = c.eval_points.iter().map(|p| (p[0], p[1])).collect();
                let PickandsTable {
                    h_alpha,
                    h_d_alpha,
                    entries,
                } = estimate_pickands_table(
                    c.alpha,
                    plan.effective_d(),
                    settings,
                    c.master_seed,
                    &points,
                )?;
                Ok(ResolvedConstants {
                    source: ConstantsSource::Estimate,
                    h_alpha: h_alpha.value,
                    h_d_alpha: Some(h_d_alpha.value),
                    pickands_term: Some(entries.iter().map(|e| e.value).collect()),
                    h_alpha_estimate: Some(h_alpha),
                    h_d_alpha_estimate: Some(h_d_alpha),
                    pickands_term_stderr: Some(entries.iter().map(|e| e.stderr).collect()),
                })
            } else {
                let est =
                    PickandsSimulation::run(c.alpha, None, settings, c.master_seed)?.continuous();
                Ok(ResolvedConstants {
                    source: ConstantsSource::Estimate,
                    h_alpha: est.value,
                    h_d_alpha: None,
                    pickands_term: None,
                    h_alpha_estimate: Some(est),
                    h_d_alpha_estimate: None,
                    pickands_term_stderr: None,
                })
            }
        }
    }
}

pub fn plan_norm_constants(
    plan: &ExperimentPlan,
    constants: &ResolvedConstants,
) -> Result<NormConstants> {
    let c = &plan.config;
    norm_constants(
        c.t,
        c.m,
        c.alpha,
        c.grid.kind(),
        constants.h_alpha,
        constants.h_d_alpha.unwrap_or(f64::NAN),
        plan.spacing.delta_used,
    )
}

/// Config echo and the derived quantities needed to reproduce a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub mesh: f64,
    pub n_points: usize,
    pub delta_nominal: f64,
    pub delta_used: f64,
    pub grid_stride: usize,
    pub effective_d: Option<f64>,
    pub norm_constants: NormConstants,
    pub constants: ResolvedConstants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub eval_points: Vec<[f64; 2]>,
    pub empirical: Vec<f64>,
    pub theoretical: Vec<f64>,
    pub per_point: Vec<f64>,
    pub sup_distance: f64,
    pub marginal_ks_cont: f64,
    pub marginal_ks_grid: f64,
    pub metadata: ReportMetadata,
}

/// Wall-clock timings; kept apart from the report, which is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub workers: usize,
    pub constants_seconds: f64,
    pub simulation_seconds: f64,
    pub comparison_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub report: ComparisonReport,
    pub replications: Vec<ReplicationResult>,
    pub timing: Timing,
}

/// Theoretical joint limit at every eval point.
pub fn theoretical_table(plan: &ExperimentPlan, constants: &ResolvedConstants) -> Result<Vec<f64>> {
    let c = &plan.config;
    c.eval_points
        .iter()
        .enumerate()
        .map(|(i, &[x, y])| {
            let pickands_term = constants.pickands_term.as_ref().map_or(0.0, |t| t[i]);
            limit_joint(
                x,
                y,
                &LimitSpec {
                    m: c.m,
                    r: c.r,
                    grid_kind: c.grid.kind(),
                    pickands_term,
                },
            )
        })
        .collect()
}

/// Compares already simulated maxima with the limit.
pub fn compare(
    plan: &ExperimentPlan,
    pairs: &[MaximaPair],
    constants: ResolvedConstants,
) -> Result<(ComparisonReport, Vec<ReplicationResult>)> {
    if pairs.is_empty() {
        return Err(Error::Validation("no replications to compare".into()));
    }
    let c = &plan.config;
    let norm = plan_norm_constants(plan, &constants)?;
    let replications: Vec<ReplicationResult> = pairs
        .iter()
        .enumerate()
        .map(|(index, &pair)| {
            let (cont, grid) = norm.normalize(pair.m_cont, pair.m_grid);
            ReplicationResult {
                index,
                pair,
                normalized: NormalizedPair { cont, grid },
            }
        })
        .collect();
    let normalized: Vec<NormalizedPair> = replications.iter().map(|r| r.normalized).collect();
    let empirical = empirical_joint_cdf(&normalized, &c.eval_points);
    let theoretical = theoretical_table(plan, &constants)?;
    let per_point: Vec<f64> = empirical
        .iter()
        .zip(&theoretical)
        .map(|(e, t)| e - t)
        .collect();
    let sup_distance = per_point.iter().fold(0.0f64, |a, d| a.max(d.abs()));

    let marginal = |x: f64| limit_marginal(x, c.r, c.m).unwrap_or(f64::NAN);
    let conts: Vec<f64> = normalized.iter().map(|p| p.cont).collect();
    let grids: Vec<f64> = normalized.iter().map(|p| p.grid).collect();
    let marginal_ks_cont = ks_statistic(&conts, marginal);
    let marginal_ks_grid = ks_statistic(&grids, marginal);
    if !(marginal_ks_cont.is_finite() && marginal_ks_grid.is_finite()) {
        return Err(Error::Quadrature("marginal limit evaluation failed".into()));
    }

    let metadata = ReportMetadata {
        config: c.clone(),
        master_seed: c.master_seed,
        mesh: plan.lattice.mesh,
        n_points: plan.lattice.n_points,
        delta_nominal: plan.spacing.nominal,
        delta_used: plan.spacing.delta_used,
        grid_stride: plan.spacing.stride,
        effective_d: matches!(c.grid, GridSpec::Pickands { .. }).then(|| plan.effective_d()),
        norm_constants: norm,
        constants,
    };
    let report = ComparisonReport {
        eval_points: c.eval_points.clone(),
        empirical,
        theoretical,
        per_point,
        sup_distance,
        marginal_ks_cont,
        marginal_ks_grid,
        metadata,
    };
    Ok((report, replications))
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<(T, usize)> {
    match workers {
        None => Ok((f(), rayon::current_num_threads())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Domain(format!("cannot build a pool of {w} workers: {e}")))?;
            Ok((pool.install(f), w.max(1)))
        }
    }
}

/// Full pipeline on `workers` threads (`None`: rayon's default pool).
pub fn run_experiment_with_workers(
    config: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<ExperimentRun> {
    let (result, workers) = in_pool(workers, || -> Result<ExperimentRun> {
        let plan = ExperimentPlan::new(config)?;
        let start = Instant::now();
        let constants = resolve_constants(&plan)?;
        let constants_seconds = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let pairs = plan.simulate()?;
        let simulation_seconds = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let (report, replications) = compare(&plan, &pairs, constants)?;
        let comparison_seconds = start.elapsed().as_secs_f64();
        Ok(ExperimentRun {
            report,
            replications,
            timing: Timing {
                workers: 0,
                constants_seconds,
                simulation_seconds,
                comparison_seconds,
            },
        })
    })?;
    let mut run = result?;
    run.timing.workers = workers;
    Ok(run)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun> {
    run_experiment_with_workers(config, None)
}

/// Marginal CDF of the normalised continuous maximum at two lattice meshes
/// on common paths: the paths are drawn at mesh factor `eta / 2` and the
/// coarse maximum is taken over every other lattice point, which is exactly
/// the `eta` lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshAudit {
    pub eval_x: Vec<f64>,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub max_change: f64,
}

pub fn mesh_audit(
    config: &ExperimentConfig,
    h_alpha: f64,
    workers: Option<usize>,
) -> Result<MeshAudit> {
    let (res, _) = in_pool(workers, || -> Result<MeshAudit> {
        let fine_config = ExperimentConfig {
            eta: config.eta / 2.0,
            ..config.clone()
        };
        let plan = ExperimentPlan::new(&fine_config)?;
        let c = &plan.config;
        let sampler = VectorSampler::new(plan.model, plan.lattice)?;
        let last = plan.lattice.last_index_within(c.t);
        let maxima: Vec<(f64, f64)> = (0..c.n_rep)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(c.master_seed, DOMAIN_REPLICATION, i as u64);
                let chi = chi_path(&sampler.sample(c.m, &mut rng)?);
                let (fine, coarse) = maxima_by_stride(&chi.values, last, 2);
                Ok((coarse, fine))
            })
            .collect::<Result<_>>()?;
        let norm = norm_constants(
            c.t,
            c.m,
            c.alpha,
            GridKind::Dense,
            h_alpha,
            f64::NAN,
            f64::NAN,
        )?;
        let coarse: Vec<f64> = maxima.iter().map(|m| norm.normalize(m.0, m.0).0).collect();
        let fine: Vec<f64> = maxima.iter().map(|m| norm.normalize(m.1, m.1).0).collect();
        let mut eval_x: Vec<f64> = c.eval_points.iter().map(|p| p[0]).collect();
        eval_x.sort_by(f64::total_cmp);
        eval_x.dedup();
        let coarse_cdf: Vec<f64> = eval_x.iter().map(|&x| empirical_cdf(&coarse, x)).collect();
        let fine_cdf: Vec<f64> = eval_x.iter().map(|&x| empirical_cdf(&fine, x)).collect();
        let max_change = coarse_cdf
            .iter()
            .zip(&fine_cdf)
            .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        Ok(MeshAudit {
            eval_x,
            coarse: coarse_cdf,
            fine: fine_cdf,
            max_change,
        })
    })?;
    res
}
