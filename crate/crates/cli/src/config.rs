//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file. Flags win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use pompeiu_core::geometry::{load_mesh, HarmonicPerturbation, Resolution, Shape};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Ball,
    Ellipsoid,
    Star,
    Mesh,
}

/// Tolerance tier. `mesh` relaxes every quadrature-limited tolerance to
/// `1e-2`, the accuracy a faceted sphere can deliver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Parametric,
    Mesh,
}

impl Tier {
    pub const MESH_TOLERANCE: f64 = 1e-2;

    pub fn relax(self, tol: f64) -> f64 {
        match self {
            Tier::Parametric => tol,
            Tier::Mesh => tol.max(Self::MESH_TOLERANCE),
        }
    }
}

/// Flags shared by `scan`, `defect` and `verify`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Domain kind.
    #[arg(long, value_enum)]
    pub shape: Option<ShapeKind>,
    /// Ball radius, or base radius of a star shape.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Ellipsoid semi-axes `a,b,c`.
    #[arg(long)]
    pub semi_axes: Option<String>,
    /// Star-shape perturbation as `l,m,eps` triples, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub star_coeffs: Option<String>,
    /// OFF file for `--shape mesh`.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Lower end of the wavenumber sweep
    #[arg(long)]
    pub k_min: Option<f64>,
    /// Upper end of the wavenumber sweep
    #[arg(long)]
    pub k_max: Option<f64>,
    /// Wavenumber grid spacing
    #[arg(long)]
    pub k_step: Option<f64>,
    /// Spherical grid degree: scan directions, or boundary sampling for
    /// `defect` and `verify`.
    #[arg(long)]
    pub grid_degree: Option<usize>,
    /// Basis degree L of Helmholtz fields.
    #[arg(long = "basis-L")]
    pub basis_l: Option<usize>,
    /// Accuracy tier; mesh inputs relax tolerances to 1e-2·|D|
    #[arg(long, value_enum)]
    pub tier: Option<Tier>,
    /// Seed for the randomized checks of `verify`
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    /// Fills unset fields from `other`.
    fn or(self, other: RunArgs) -> RunArgs {
        RunArgs {
            shape: self.shape.or(other.shape),
            radius: self.radius.or(other.radius),
            semi_axes: self.semi_axes.or(other.semi_axes),
            star_coeffs: self.star_coeffs.or(other.star_coeffs),
            mesh: self.mesh.or(other.mesh),
            k_min: self.k_min.or(other.k_min),
            k_max: self.k_max.or(other.k_max),
            k_step: self.k_step.or(other.k_step),
            grid_degree: self.grid_degree.or(other.grid_degree),
            basis_l: self.basis_l.or(other.basis_l),
            tier: self.tier.or(other.tier),
            seed: self.seed.or(other.seed),
            out: self.out.or(other.out),
            config: self.config,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, true).map_err(|_| CliError::Config(format!("`{key}`: unknown value `{value}`")))
}

/// Parses the flat configuration format: one `key = value` per line, `#` or
/// `;` comments, optional `[section]` headers (ignored). Keys are the long
/// flag names; `_` and `-` are interchangeable.
pub fn parse_config_file(text: &str, base: &Path) -> Result<RunArgs, CliError> {
    let mut out = RunArgs::default();
    let mut seen = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') || line.starts_with('[') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        if seen.insert(key.clone(), n + 1).is_some() {
            return Err(CliError::Config(format!("config line {}: duplicate key `{key}`", n + 1)));
        }
        match key.as_str() {
            "shape" => out.shape = Some(parse_enum(&key, value)?),
            "radius" => out.radius = Some(parse_value(&key, value)?),
            "semi-axes" => out.semi_axes = Some(value.to_string()),
            "star-coeffs" => out.star_coeffs = Some(value.to_string()),
            "mesh" => out.mesh = Some(base.join(value)),
            "k-min" => out.k_min = Some(parse_value(&key, value)?),
            "k-max" => out.k_max = Some(parse_value(&key, value)?),
            "k-step" => out.k_step = Some(parse_value(&key, value)?),
            "grid-degree" => out.grid_degree = Some(parse_value(&key, value)?),
            "basis-L" | "basis-l" => out.basis_l = Some(parse_value(&key, value)?),
            "tier" => out.tier = Some(parse_enum(&key, value)?),
            "seed" => out.seed = Some(parse_value(&key, value)?),
            "out" => out.out = Some(base.join(value)),
            _ => return Err(CliError::Config(format!("config line {}: unknown key `{key}`", n + 1))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarCoefficient {
    pub l: usize,
    pub m: i64,
    pub eps: f64,
}

/// Shape as recorded in output metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShapeDef {
    Ball { radius: f64 },
    Ellipsoid { semi_axes: [f64; 3] },
    Star { base_radius: f64, coefficients: Vec<StarCoefficient> },
    Mesh { path: String },
}

impl ShapeDef {
    pub fn build(&self) -> Result<Shape, CliError> {
        Ok(match self {
            ShapeDef::Ball { radius } => Shape::ball(*radius)?,
            ShapeDef::Ellipsoid { semi_axes } => Shape::ellipsoid(*semi_axes)?,
            ShapeDef::Star { base_radius, coefficients } => Shape::star(
                *base_radius,
                coefficients.iter().map(|c| HarmonicPerturbation { l: c.l, m: c.m, eps: c.eps }).collect(),
            )?,
            ShapeDef::Mesh { path } => Shape::Mesh(load_mesh(path).map_err(pompeiu_core::Error::from)?),
        })
    }

    /// Whether the parameters describe a sphere exactly.
    pub fn is_sphere(&self) -> Option<bool> {
        match self {
            ShapeDef::Ball { .. } => Some(true),
            ShapeDef::Ellipsoid { semi_axes: [a, b, c] } => Some(a == b && b == c),
            ShapeDef::Star { coefficients, .. } => Some(coefficients.iter().all(|c| c.eps == 0.0 || c.l == 0)),
            ShapeDef::Mesh { .. } => None,
        }
    }
}

/// Per-command defaults.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub k_min: f64,
    pub k_max: f64,
    pub k_step: f64,
    pub grid_degree: usize,
    pub basis_l: usize,
}

pub const SCAN_DEFAULTS: Defaults = Defaults { k_min: 0.5, k_max: 10.0, k_step: 0.01, grid_degree: 30, basis_l: 8 };
pub const DEFECT_DEFAULTS: Defaults = Defaults { k_min: 3.0, k_max: 8.0, k_step: 0.05, grid_degree: 40, basis_l: 8 };
pub const VERIFY_DEFAULTS: Defaults = Defaults { k_min: 0.5, k_max: 10.0, k_step: 0.01, grid_degree: 40, basis_l: 4 };

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT: &str = "lab-output";

/// Validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub shape: ShapeDef,
    pub k_min: f64,
    pub k_max: f64,
    pub k_step: f64,
    pub grid_degree: usize,
    pub basis_l: usize,
    /// Whether `basis_l` came from the built-in default.
    pub basis_l_is_default: bool,
    pub tier: Tier,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
}

fn parse_list(key: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').map(|t| parse_value(key, t.trim())).collect()
}

impl RunConfig {
    pub fn resolve(flags: RunArgs, defaults: Defaults) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
                parse_config_file(&text, path.parent().unwrap_or(Path::new(".")))?
            }
            None => RunArgs::default(),
        };
        let a = flags.or(file);

        let kind = a.shape.unwrap_or(ShapeKind::Ball);
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Config(format!("`{key}` must be positive, got {v}")))
            }
        };
        let shape = match kind {
            ShapeKind::Ball => ShapeDef::Ball { radius: positive("radius", a.radius.unwrap_or(1.0))? },
            ShapeKind::Ellipsoid => {
                let v = parse_list("semi-axes", a.semi_axes.as_deref().unwrap_or("1,1,1.3"))?;
                if v.len() != 3 {
                    return Err(CliError::Config(format!("`semi-axes` needs 3 values, got {}", v.len())));
                }
                for x in &v {
                    positive("semi-axes", *x)?;
                }
                ShapeDef::Ellipsoid { semi_axes: [v[0], v[1], v[2]] }
            }
            ShapeKind::Star => {
                let v = parse_list("star-coeffs", a.star_coeffs.as_deref().unwrap_or("2,0,0.05"))?;
                if v.is_empty() || v.len() % 3 != 0 {
                    return Err(CliError::Config("`star-coeffs` needs l,m,eps triples".into()));
                }
                let coefficients = v
                    .chunks(3)
                    .map(|t| {
                        if t[0] < 0.0 || t[0].fract() != 0.0 || t[1].fract() != 0.0 {
                            return Err(CliError::Config(format!("`star-coeffs`: l and m must be integers, got {t:?}")));
                        }
                        Ok(StarCoefficient { l: t[0] as usize, m: t[1] as i64, eps: t[2] })
                    })
                    .collect::<Result<_, _>>()?;
                ShapeDef::Star { base_radius: positive("radius", a.radius.unwrap_or(1.0))?, coefficients }
            }
            ShapeKind::Mesh => {
                let path = a.mesh.ok_or_else(|| CliError::Config("`--shape mesh` requires `--mesh PATH`".into()))?;
                ShapeDef::Mesh { path: path.to_string_lossy().into_owned() }
            }
        };

        let k_min = a.k_min.unwrap_or(defaults.k_min);
        let k_max = a.k_max.unwrap_or(defaults.k_max);
        let k_step = a.k_step.unwrap_or(defaults.k_step);
        positive("k-min", k_min)?;
        positive("k-step", k_step)?;
        if k_min >= k_max || !k_max.is_finite() {
            return Err(CliError::Config(format!("need k-min < k-max, got {k_min} and {k_max}")));
        }
        let grid_degree = a.grid_degree.unwrap_or(defaults.grid_degree);
        if grid_degree == 0 {
            return Err(CliError::Config("`grid-degree` must be at least 1".into()));
        }
        let basis_l = a.basis_l.unwrap_or(defaults.basis_l);
        let tier = a.tier.unwrap_or(if kind == ShapeKind::Mesh { Tier::Mesh } else { Tier::Parametric });
        Ok(RunConfig {
            shape,
            k_min,
            k_max,
            k_step,
            grid_degree,
            basis_l,
            basis_l_is_default: a.basis_l.is_none(),
            tier,
            seed: a.seed.unwrap_or(DEFAULT_SEED),
            out: a.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        })
    }

    /// Sampling resolution for boundary and volume quadratures.
    pub fn resolution(&self) -> Resolution {
        match self.shape {
            ShapeDef::Mesh { .. } => Resolution { grid_degree: self.grid_degree, radial_order: 16, mesh_order: 3 },
            _ => Resolution { grid_degree: self.grid_degree, ..Resolution::default() },
        }
    }
}
