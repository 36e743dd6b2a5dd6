use serde::{Deserialize, Serialize};

use crate::chiproc::{GridKind, GridSpec};
use crate::error::{Error, Result};
use crate::pickands::PickandsSettings;

pub const DEFAULT_ETA: f64 = 0.05;
pub const DEFAULT_EVAL_AXIS: [f64; 6] = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
/// Replications used when Pickands constants are estimated for an experiment.
pub const DEFAULT_CONSTANT_REPLICATIONS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantsSource {
    #[default]
    Estimate,
    Provided,
}

/// One provided value of the Pickands-grid term at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvidedTerm {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub alpha: f64,
    pub r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub grid: GridSpec,
    #[serde(default = "default_eta")]
    pub eta: f64,
    pub n_rep: usize,
    pub master_seed: u64,
    #[serde(default = "default_eval_points")]
    pub eval_points: Vec<[f64; 2]>,
    #[serde(default)]
    pub constants_source: ConstantsSource,
    #[serde(rename = "H_alpha", default, skip_serializing_if = "Option::is_none")]
    pub h_alpha: Option<f64>,
    #[serde(rename = "H_D_alpha", default, skip_serializing_if = "Option::is_none")]
    pub h_d_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pickands_term: Option<Vec<ProvidedTerm>>,
    /// Estimation settings when `constants_source` is `estimate`; defaults
    /// depend on `alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pickands: Option<PickandsSettings>,
}

fn default_eta() -> f64 {
    DEFAULT_ETA
}

pub fn default_eval_points() -> Vec<[f64; 2]> {
    DEFAULT_EVAL_AXIS
        .iter()
        .flat_map(|&x| DEFAULT_EVAL_AXIS.iter().map(move |&y| [x, y]))
        .collect()
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl ExperimentConfig {
    pub fn pickands_settings(&self) -> PickandsSettings {
        self.pickands.unwrap_or_else(|| {
            PickandsSettings::defaults_for(self.alpha, DEFAULT_CONSTANT_REPLICATIONS)
        })
    }

    /// Checks every domain constraint of the downstream modules.
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(invalid(format!(
                "alpha must lie in (0, 2], got {}",
                self.alpha
            )));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(invalid(format!(
                "r must be finite and >= 0, got {}",
                self.r
            )));
        }
        if !(self.t > std::f64::consts::E && self.t.is_finite()) {
            return Err(invalid(format!("T must exceed e, got {}", self.t)));
        }
        if self.r / self.t.ln() >= 1.0 {
            return Err(invalid(format!(
                "r / ln T must be < 1, got {}",
                self.r / self.t.ln()
            )));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if self.n_rep == 0 {
            return Err(invalid("n_rep must be at least 1"));
        }
        if self.eval_points.is_empty() {
            return Err(invalid("eval_points must be nonempty"));
        }
        if self.eval_points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("eval_points must be finite"));
        }
        self.grid.validate().map_err(|e| invalid(e.to_string()))?;
        if let GridSpec::Pickands { d } = self.grid {
            if d < self.eta {
                return Err(invalid(format!(
                    "Pickands D={d} is finer than the mesh factor eta={}",
                    self.eta
                )));
            }
        }
        match self.constants_source {
            ConstantsSource::Provided => {
                match self.h_alpha {
                    Some(h) if h > 0.0 && h.is_finite() => {}
                    _ => return Err(invalid("provided constants need a positive H_alpha")),
                }
                if self.grid.kind() == GridKind::Pickands {
                    match self.h_d_alpha {
                        Some(h) if h > 0.0 && h.is_finite() => {}
                        _ => {
                            return Err(invalid(
                                "provided constants for a Pickands grid need a positive H_D_alpha",
                            ))
                        }
                    }
                    let table = self.pickands_term.as_ref().ok_or_else(|| {
                        invalid("provided constants for a Pickands grid need a pickands_term table")
                    })?;
                    for p in &self.eval_points {
                        let hit = table.iter().find(|e| e.x == p[0] && e.y == p[1]);
                        match hit {
                            Some(e) if e.value >= 0.0 && e.value.is_finite() => {}
                            Some(_) => {
                                return Err(invalid(format!(
                                    "pickands_term at {p:?} must be finite and >= 0"
                                )))
                            }
                            None => {
                                return Err(invalid(format!(
                                    "pickands_term has no entry for eval point {p:?}"
                                )))
                            }
                        }
                    }
                }
            }
            ConstantsSource::Estimate => {
                if let Some(s) = self.pickands {
                    if s.n_rep < PickandsSettings::MIN_REPLICATIONS
                        || !(s.mesh > 0.0 && s.mesh <= s.lambda)
                    {
                        return Err(invalid(
                            "pickands settings need n_rep >= 100 and 0 < mesh <= lambda",
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a JSON experiment document.
pub fn parse_config(document: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse {
            path,
            message: e.into_inner().to_string(),
        }
    })?;
    config.validate()?;
    Ok(config)
}
