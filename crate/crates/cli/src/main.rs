use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use chigrid::chiproc::{chi_path, maxima_with_spacing, GridKind, MaximaPair};
use chigrid::gaussim::VectorSampler;
use chigrid::harness::{
    compare, parse_config, parse_samples_csv, prepare_directory, resolve_constants,
    run_experiment_with_workers, theoretical_table, to_json, write_outputs, ExperimentConfig,
    ExperimentPlan, ExperimentRun, Timing,
};
use chigrid::pickands::{estimate_pickands_table, window_bias, PickandsSimulation};
use chigrid::rng::{stream, DOMAIN_REPLICATION};
use chigrid::theory::limit_marginal;
use chigrid::{Error, Result};

#[derive(Parser)]
#[command(
    name = "chigrid",
    version,
    about = "Maxima of chi-processes over continuous time and uniform grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: constants, replications, empirical vs limiting joint CDF
    Experiment(Common),
    /// One replication; dumps the component and chi paths
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Replication index whose stream is used
        #[arg(long, default_value_t = 0)]
        replication: u64,
    },
    /// Pickands constants only
    Pickands(Common),
    /// Theoretical limiting CDF table only
    Limits(Common),
    /// Re-evaluates an existing samples.csv against the config's limit
    Compare {
        #[command(flatten)]
        common: Common,
        /// samples.csv written by a previous experiment
        #[arg(long)]
        samples: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Overrides master_seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, env = "CHIGRID_WORKERS")]
    workers: Option<usize>,
    /// Overwrite existing outputs
    #[arg(long)]
    force: bool,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(&self.config)?;
        let mut config = parse_config(&text)?;
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        Ok(config)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            builder = builder.num_threads(w.max(1));
        }
        builder
            .build()
            .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))
    }
}

fn write_files(dir: &Path, force: bool, files: &[(&str, String)]) -> Result<()> {
    let names: Vec<&str> = files.iter().map(|f| f.0).collect();
    prepare_directory(dir, &names, force)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn experiment(c: &Common) -> Result<()> {
    let config = c.load()?;
    let run = run_experiment_with_workers(&config, c.workers)?;
    write_outputs(&run, &c.out, c.force)?;
    let r = &run.report;
    println!(
        "sup_distance {:.6}  marginal_ks_cont {:.6}  marginal_ks_grid {:.6}  ({} replications, {} workers)",
        r.sup_distance,
        r.marginal_ks_cont,
        r.marginal_ks_grid,
        run.replications.len(),
        run.timing.workers
    );
    Ok(())
}

#[derive(Serialize)]
struct SimulationDump {
    replication: u64,
    master_seed: u64,
    mesh: f64,
    n_points: usize,
    grid_stride: usize,
    shared_z: Option<Vec<f64>>,
    maxima: MaximaPair,
}

fn simulate(c: &Common, replication: u64) -> Result<()> {
    let config = c.load()?;
    let plan = ExperimentPlan::new(&config)?;
    let sampler = VectorSampler::new(plan.model, plan.lattice)?;
    let mut rng = stream(config.master_seed, DOMAIN_REPLICATION, replication);
    let input = sampler.sample(config.m, &mut rng)?;
    let chi = chi_path(&input);
    let maxima = maxima_with_spacing(&chi, &plan.spacing, config.t);

    let mut paths = String::from("index,t");
    for i in 1..=config.m {
        paths.push_str(&format!(",x{i}"));
    }
    paths.push_str(",chi\n");
    for (k, value) in chi.values.iter().enumerate() {
        paths.push_str(&format!("{k},{}", plan.lattice.time(k)));
        for comp in &input.components {
            paths.push_str(&format!(",{}", comp.values[k]));
        }
        paths.push_str(&format!(",{value}\n"));
    }
    let dump = SimulationDump {
        replication,
        master_seed: config.master_seed,
        mesh: plan.lattice.mesh,
        n_points: plan.lattice.n_points,
        grid_stride: plan.spacing.stride,
        shared_z: input.shared_z.clone(),
        maxima,
    };
    write_files(
        &c.out,
        c.force,
        &[("paths.csv", paths), ("simulation.json", to_json(&dump))],
    )?;
    println!(
        "m_cont {:.6}  m_grid {:.6}  delta_used {}",
        maxima.m_cont, maxima.m_grid, maxima.delta_used
    );
    Ok(())
}

#[derive(Serialize)]
struct PickandsReport<T: Serialize> {
    alpha: f64,
    master_seed: u64,
    #[serde(flatten)]
    estimates: T,
    window_bias: chigrid::pickands::WindowBias,
}

fn pickands(c: &Common) -> Result<()> {
    let config = c.load()?;
    let plan = ExperimentPlan::new(&config)?;
    let settings = config.pickands_settings();
    let seed = config.master_seed;
    let body = c.pool()?.install(|| -> Result<String> {
        if config.grid.kind() == GridKind::Pickands {
            let d = plan.effective_d();
            let points: Vec<(f64, f64)> = config.eval_points.iter().map(|p| (p[0], p[1])).collect();
            let table = estimate_pickands_table(config.alpha, d, settings, seed, &points)?;
            let bias = window_bias(config.alpha, Some(d), settings, seed)?;
            println!(
                "H_alpha {:.6} +- {:.6}",
                table.h_alpha.value, table.h_alpha.stderr
            );
            println!(
                "H_D_alpha {:.6} +- {:.6} (D = {d})",
                table.h_d_alpha.value, table.h_d_alpha.stderr
            );
            Ok(to_json(&PickandsReport {
                alpha: config.alpha,
                master_seed: seed,
                estimates: table,
                window_bias: bias,
            }))
        } else {
            let h = PickandsSimulation::run(config.alpha, None, settings, seed)?.continuous();
            let bias = window_bias(config.alpha, None, settings, seed)?;
            println!("H_alpha {:.6} +- {:.6}", h.value, h.stderr);
            #[derive(Serialize)]
            struct Only {
                #[serde(rename = "H_alpha")]
                h_alpha: chigrid::PickandsEstimate,
            }
            Ok(to_json(&PickandsReport {
                alpha: config.alpha,
                master_seed: seed,
                estimates: Only { h_alpha: h },
                window_bias: bias,
            }))
        }
    })?;
    write_files(&c.out, c.force, &[("pickands.json", body)])
}

fn limits(c: &Common) -> Result<()> {
    let config = c.load()?;
    let plan = ExperimentPlan::new(&config)?;
    let constants = c.pool()?.install(|| resolve_constants(&plan))?;
    let joint = theoretical_table(&plan, &constants)?;
    let mut csv = String::from("x,y,marginal_x,marginal_y,joint\n");
    for (p, j) in config.eval_points.iter().zip(&joint) {
        let fx = limit_marginal(p[0], config.r, config.m)?;
        let fy = limit_marginal(p[1], config.r, config.m)?;
        csv.push_str(&format!("{},{},{fx},{fy},{j}\n", p[0], p[1]));
    }
    write_files(
        &c.out,
        c.force,
        &[("limits.csv", csv), ("constants.json", to_json(&constants))],
    )?;
    println!("{} limit values written", joint.len());
    Ok(())
}

fn compare_samples(c: &Common, samples: &Path) -> Result<()> {
    let config = c.load()?;
    let plan = ExperimentPlan::new(&config)?;
    let rows = parse_samples_csv(&fs::read_to_string(samples)?)?;
    let pairs: Vec<MaximaPair> = rows
        .iter()
        .map(|&(_, m_cont, m_grid, _, _)| MaximaPair {
            m_cont,
            m_grid,
            delta_used: plan.spacing.delta_used,
            t: config.t,
        })
        .collect();
    let start = Instant::now();
    let constants = c.pool()?.install(|| resolve_constants(&plan))?;
    let constants_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let (report, replications) = compare(&plan, &pairs, constants)?;
    let timing = Timing {
        workers: c.workers.unwrap_or_else(rayon::current_num_threads),
        constants_seconds,
        simulation_seconds: 0.0,
        comparison_seconds: start.elapsed().as_secs_f64(),
    };
    let run = ExperimentRun {
        report,
        replications,
        timing,
    };
    write_outputs(&run, &c.out, c.force)?;
    println!(
        "sup_distance {:.6}  ({} samples)",
        run.report.sup_distance,
        run.replications.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Experiment(c) => experiment(c),
        Command::Simulate {
            common,
            replication,
        } => simulate(common, *replication),
        Command::Pickands(c) => pickands(c),
        Command::Limits(c) => limits(c),
        Command::Compare { common, samples } => compare_samples(common, samples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
