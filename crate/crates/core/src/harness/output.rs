//! On-disk experiment outputs.
//!
//! `manifest.json`, `samples.csv`, `cdf.csv` and `summary.json` are
//! byte-identical for a fixed config and seed. Wall-clock data goes to
//! `timing.json`, which is excluded from that contract.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::runner::{ComparisonReport, ExperimentRun, ReplicationResult};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SAMPLES_FILE: &str = "samples.csv";
pub const CDF_FILE: &str = "cdf.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMING_FILE: &str = "timing.json";

const ALL_FILES: [&str; 5] = [
    MANIFEST_FILE,
    SAMPLES_FILE,
    CDF_FILE,
    SUMMARY_FILE,
    TIMING_FILE,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub metadata: super::runner::ReportMetadata,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_rep: usize,
    pub sup_distance: f64,
    pub sup_point: [f64; 2],
    pub marginal_ks_cont: f64,
    pub marginal_ks_grid: f64,
}

impl Summary {
    pub fn from_report(report: &ComparisonReport, n_rep: usize) -> Self {
        let worst = report
            .per_point
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map_or(0, |(i, _)| i);
        Self {
            n_rep,
            sup_distance: report.sup_distance,
            sup_point: report.eval_points[worst],
            marginal_ks_cont: report.marginal_ks_cont,
            marginal_ks_grid: report.marginal_ks_grid,
        }
    }
}

pub fn samples_csv(replications: &[ReplicationResult]) -> String {
    let mut out = String::from("replication_index,m_cont,m_grid,norm_cont,norm_grid\n");
    for r in replications {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.index, r.pair.m_cont, r.pair.m_grid, r.normalized.cont, r.normalized.grid
        );
    }
    out
}

pub fn cdf_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("x,y,empirical,theoretical,diff\n");
    for (i, [x, y]) in report.eval_points.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            x, y, report.empirical[i], report.theoretical[i], report.per_point[i]
        );
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

/// Refuses to touch a directory that already holds any output file unless
/// `force` is set; creates the directory otherwise.
pub fn prepare_directory(dir: &Path, files: &[&str], force: bool) -> Result<()> {
    if !force && files.iter().any(|f| dir.join(f).exists()) {
        return Err(Error::OutputExists(dir.to_path_buf()));
    }
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn write_outputs(run: &ExperimentRun, dir: &Path, force: bool) -> Result<Manifest> {
    prepare_directory(dir, &ALL_FILES, force)?;
    let manifest = Manifest {
        tool: "chigrid".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        metadata: run.report.metadata.clone(),
        files: ALL_FILES.iter().map(|s| s.to_string()).collect(),
    };
    let summary = Summary::from_report(&run.report, run.replications.len());
    let write = |name: &str, body: String| -> Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        Ok(path)
    };
    write(MANIFEST_FILE, to_json(&manifest))?;
    write(SAMPLES_FILE, samples_csv(&run.replications))?;
    write(CDF_FILE, cdf_csv(&run.report))?;
    write(SUMMARY_FILE, to_json(&summary))?;
    write(TIMING_FILE, to_json(&run.timing))?;
    Ok(manifest)
}

/// `(replication_index, m_cont, m_grid, norm_cont, norm_grid)`
pub type SampleRow = (usize, f64, f64, f64, f64);

/// Reads the normalised pairs back from a `samples.csv` body.
pub fn parse_samples_csv(body: &str) -> Result<Vec<SampleRow>> {
    let bad = |line: usize| Error::Parse {
        path: format!("{SAMPLES_FILE}:{line}"),
        message: "malformed row".into(),
    };
    let mut lines = body.lines().enumerate();
    match lines.next() {
        Some((_, "replication_index,m_cont,m_grid,norm_cont,norm_grid")) => {}
        _ => return Err(bad(1)),
    }
    lines
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad(i + 1));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 1));
            Ok((
                f[0].parse().map_err(|_| bad(i + 1))?,
                num(f[1])?,
                num(f[2])?,
                num(f[3])?,
                num(f[4])?,
            ))
        })
        .collect()
}
