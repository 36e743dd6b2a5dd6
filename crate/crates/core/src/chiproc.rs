//! Chi-process paths, grid regimes and the continuous/grid maxima pair.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussim::{LatticeSpec, VectorChiInput};

/// Pointwise Euclidean norm of `m` Gaussian components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiPath {
    pub spec: LatticeSpec,
    pub values: Vec<f64>,
    pub m: usize,
}

pub fn chi_path(input: &VectorChiInput) -> ChiPath {
    let n = input.spec.n_points;
    let mut sq = vec![0.0; n];
    for comp in &input.components {
        for (s, v) in sq.iter_mut().zip(&comp.values) {
            *s += v * v;
        }
    }
    ChiPath {
        spec: input.spec,
        values: sq.into_iter().map(f64::sqrt).collect(),
        m: input.m(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Sparse,
    Pickands,
    Dense,
}

/// Observation grid `{k * delta(T)}` and its spacing rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GridSpec {
    /// Constant spacing `delta0`.
    Sparse {
        #[serde(default = "default_delta0")]
        delta0: f64,
    },
    /// `delta(T) = D (2 ln T)^(-1/alpha)`.
    Pickands {
        #[serde(rename = "D")]
        d: f64,
    },
    /// `delta(T) = (2 ln T)^(-2/alpha)`.
    Dense {},
}

fn default_delta0() -> f64 {
    1.0
}

impl GridSpec {
    pub fn kind(&self) -> GridKind {
        match self {
            GridSpec::Sparse { .. } => GridKind::Sparse,
            GridSpec::Pickands { .. } => GridKind::Pickands,
            GridSpec::Dense {} => GridKind::Dense,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GridSpec::Sparse { delta0 } if !(delta0 > 0.0 && delta0.is_finite()) => Err(domain(
                format!("sparse delta0 must be positive, got {delta0}"),
            )),
            GridSpec::Pickands { d } if !(d > 0.0 && d.is_finite()) => {
                Err(domain(format!("Pickands D must be positive, got {d}")))
            }
            _ => Ok(()),
        }
    }

    /// Nominal spacing `delta(T)` before snapping to the lattice.
    pub fn nominal_spacing(&self, t: f64, alpha: f64) -> f64 {
        let scale = 2.0 * t.ln();
        match *self {
            GridSpec::Sparse { delta0 } => delta0,
            GridSpec::Pickands { d } => d * scale.powf(-1.0 / alpha),
            GridSpec::Dense {} => scale.powf(-2.0 / alpha),
        }
    }
}

/// Grid spacing snapped to a positive multiple of the lattice mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpacing {
    pub nominal: f64,
    pub delta_used: f64,
    pub stride: usize,
}

pub fn grid_spacing(grid: &GridSpec, t: f64, alpha: f64, mesh: f64) -> Result<GridSpacing> {
    grid.validate()?;
    if !(t > std::f64::consts::E) {
        return Err(domain(format!("horizon T must exceed e, got {t}")));
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(domain(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    if !(mesh > 0.0) {
        return Err(domain(format!("mesh must be positive, got {mesh}")));
    }
    let nominal = grid.nominal_spacing(t, alpha);
    if nominal < mesh * (1.0 - 1e-9) {
        return Err(Error::GridFinerThanMesh { nominal, mesh });
    }
    let stride = ((nominal / mesh).round() as usize).max(1);
    Ok(GridSpacing {
        nominal,
        delta_used: stride as f64 * mesh,
        stride,
    })
}

/// Continuous-time maximum (all lattice points in `[0, T]`) and grid
/// maximum (every `stride`-th lattice point, starting at 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximaPair {
    pub m_cont: f64,
    pub m_grid: f64,
    pub delta_used: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

/// Maxima over the first `last + 1` lattice values, the grid being every
/// `stride`-th of them.
pub fn maxima_by_stride(values: &[f64], last: usize, stride: usize) -> (f64, f64) {
    let window = &values[..=last.min(values.len() - 1)];
    let m_cont = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let m_grid = window
        .iter()
        .step_by(stride.max(1))
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    (m_cont, m_grid)
}

pub fn maxima_with_spacing(chi: &ChiPath, spacing: &GridSpacing, t: f64) -> MaximaPair {
    let last = chi.spec.last_index_within(t);
    let (m_cont, m_grid) = maxima_by_stride(&chi.values, last, spacing.stride);
    MaximaPair {
        m_cont,
        m_grid,
        delta_used: spacing.delta_used,
        t,
    }
}

pub fn maxima_pair(chi: &ChiPath, grid: &GridSpec, t: f64, alpha: f64) -> Result<MaximaPair> {
    let spacing = grid_spacing(grid, t, alpha, chi.spec.mesh)?;
    Ok(maxima_with_spacing(chi, &spacing, t))
}

/// Outcome of probing the sphere representation `chi = sup_v <X, v>` at one
/// lattice point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereProbe {
    /// Chi value at the lattice point.
    pub lhs: f64,
    /// Largest inner product over the probe set, including `X / |X|`.
    pub rhs_probe_max: f64,
    /// Largest inner product over the random unit vectors alone.
    pub random_probe_max: f64,
}

pub fn sphere_oracle<R: Rng + ?Sized>(
    input: &VectorChiInput,
    k: usize,
    probes: usize,
    rng: &mut R,
) -> Result<SphereProbe> {
    if probes == 0 {
        return Err(domain("need at least one probe"));
    }
    if k >= input.spec.n_points {
        return Err(domain(format!("lattice index {k} out of range")));
    }
    let x: Vec<f64> = input.components.iter().map(|c| c.values[k]).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateZeroVector { index: k });
    }
    let attained: f64 = x.iter().map(|v| v * v / norm).sum();
    let mut random_probe_max = f64::NEG_INFINITY;
    let mut v = vec![0.0; x.len()];
    for _ in 0..probes {
        let mut len = 0.0;
        while len == 0.0 {
            for vi in v.iter_mut() {
                *vi = rng.sample(StandardNormal);
            }
            len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        }
        let dot: f64 = x.iter().zip(&v).map(|(a, b)| a * b / len).sum();
        random_probe_max = random_probe_max.max(dot);
    }
    Ok(SphereProbe {
        lhs: norm,
        rhs_probe_max: attained.max(random_probe_max),
        random_probe_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, DOMAIN_DIAGNOSTIC};

    fn input(components: Vec<Vec<f64>>, mesh: f64) -> VectorChiInput {
        let n = components[0].len().max(2);
        VectorChiInput::from_components(LatticeSpec::new(mesh, n).unwrap(), components).unwrap()
    }

    #[test]
    fn chi_values() {
        let c = chi_path(&input(vec![vec![-2.0, 3.0]], 0.1));
        assert_eq!(c.values, vec![2.0, 3.0]);
        let c = chi_path(&input(vec![vec![3.0, 0.0], vec![4.0, 0.0]], 0.1));
        assert_eq!(c.values, vec![5.0, 0.0]);
        assert_eq!(c.m, 2);
    }

    #[test]
    fn rotation_invariance() {
        let (s, co) = (0.6_f64, 0.8_f64);
        let a = vec![0.3, -1.2, 2.5, 0.0, -0.7];
        let b = vec![1.1, 0.4, -0.9, 2.2, 0.05];
        let ra: Vec<f64> = a.iter().zip(&b).map(|(x, y)| co * x - s * y).collect();
        let rb: Vec<f64> = a.iter().zip(&b).map(|(x, y)| s * x + co * y).collect();
        let c1 = chi_path(&input(vec![a, b], 0.1));
        let c2 = chi_path(&input(vec![ra, rb], 0.1));
        for (u, v) in c1.values.iter().zip(&c2.values) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn spacing_examples() {
        let t = 50f64.exp();
        let p = GridSpec::Pickands { d: 1.0 };
        assert!((p.nominal_spacing(t, 2.0) - 0.1).abs() < 1e-14);
        let s = grid_spacing(&GridSpec::Sparse { delta0: 1.0 }, t, 1.0, 0.004).unwrap();
        assert_eq!(s.stride, 250);
        assert!((s.delta_used - 1.0).abs() < 1e-12);
        assert!((GridSpec::Dense {}.nominal_spacing(t, 1.0) - 1e-4).abs() < 1e-18);
        assert!(matches!(
            grid_spacing(&GridSpec::Dense {}, t, 1.0, 1e-3),
            Err(Error::GridFinerThanMesh { .. })
        ));
        assert!(grid_spacing(&GridSpec::Dense {}, 2.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn stride_one_grid_is_the_lattice() {
        let c = chi_path(&input(vec![vec![0.1, 0.9, 0.3, 1.4, 0.2]], 0.5));
        let spacing = GridSpacing {
            nominal: 0.5,
            delta_used: 0.5,
            stride: 1,
        };
        let pair = maxima_with_spacing(&c, &spacing, 2.0);
        assert_eq!(pair.m_cont, pair.m_grid);
        assert_eq!(pair.m_cont, 1.4);
    }

    #[test]
    fn off_grid_peak_is_missed() {
        let mut v = vec![0.5; 101];
        v[37] = 3.0; // not a multiple of 10
        let c = chi_path(&input(vec![v.clone()], 0.01));
        let spacing = GridSpacing {
            nominal: 0.1,
            delta_used: 0.1,
            stride: 10,
        };
        let pair = maxima_with_spacing(&c, &spacing, 1.0);
        let exhaustive = v.iter().copied().fold(f64::MIN, f64::max);
        let on_grid = (0..=100).step_by(10).map(|k| v[k]).fold(f64::MIN, f64::max);
        assert_eq!(pair.m_cont, exhaustive);
        assert_eq!(pair.m_grid, on_grid);
        assert!(pair.m_grid < pair.m_cont);
    }

    #[test]
    fn horizon_limits_the_window() {
        let c = chi_path(&input(vec![vec![0.0, 1.0, 2.0, 9.0]], 1.0));
        let spacing = GridSpacing {
            nominal: 2.0,
            delta_used: 2.0,
            stride: 2,
        };
        let pair = maxima_with_spacing(&c, &spacing, 2.0);
        assert_eq!(pair.m_cont, 2.0);
        assert_eq!(pair.m_grid, 2.0);
    }

    #[test]
    fn sphere_examples() {
        let x = input(vec![vec![3.0, 0.0], vec![4.0, 0.0]], 0.1);
        let probe = sphere_oracle(&x, 0, 50, &mut stream(0, DOMAIN_DIAGNOSTIC, 0)).unwrap();
        assert_eq!(probe.lhs, 5.0);
        assert!((probe.rhs_probe_max - 5.0).abs() < 1e-12);
        assert!(probe.random_probe_max <= 5.0);
        assert!(matches!(
            sphere_oracle(&x, 1, 5, &mut stream(0, DOMAIN_DIAGNOSTIC, 0)),
            Err(Error::DegenerateZeroVector { index: 1 })
        ));
        let one = input(vec![vec![-2.5, 1.0]], 0.1);
        let probe = sphere_oracle(&one, 0, 40, &mut stream(0, DOMAIN_DIAGNOSTIC, 1)).unwrap();
        assert_eq!(probe.lhs, 2.5);
        // probes are +-1 in one dimension; one of 40 is +sign(x) w.p. ~1
        assert_eq!(probe.random_probe_max, 2.5);
    }

    #[test]
    fn grid_json_form() {
        let g: GridSpec = serde_json::from_str(r#"{"kind":"pickands","D":0.5}"#).unwrap();
        assert_eq!(g, GridSpec::Pickands { d: 0.5 });
        let g: GridSpec = serde_json::from_str(r#"{"kind":"sparse"}"#).unwrap();
        assert_eq!(g, GridSpec::Sparse { delta0: 1.0 });
        assert!(serde_json::from_str::<GridSpec>(r#"{"kind":"dense","D":1}"#).is_err());
    }
}
