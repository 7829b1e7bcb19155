//! JSON run configuration.
//!
//! ```json
//! {
//!   "dim": 2, "modes_per_axis": 32, "nu": 0.1, "epsilon": 0.0, "m": 1,
//!   "dt": 1e-3, "horizon": 1.0, "scheme": "IF_RK4", "nonlinearity": true,
//!   "forcing": { "kind": "zero" }, "snapshot_stride": 100, "seed": 0,
//!   "output_dir": "runs/tg",
//!   "initial": { "kind": "taylor_green", "amplitude": 1.0 }
//! }
//! ```
//!
//! Only `dim`, `modes_per_axis`, `nu`, `dt` and `horizon` are required.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nsrg_core::evolution::{ForcingSpec, Scheme, SolverConfig};
use nsrg_core::spectral::{make_grid, random_solenoidal, taylor_green, C64};
use nsrg_core::{Grid, SpectralField, VectorField, ViscosityParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SchemeName {
    #[default]
    IfRk4,
    IfEuler,
    GalerkinOde,
    Picard,
}

impl From<SchemeName> for Scheme {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::IfRk4 => Scheme::IfRk4,
            SchemeName::IfEuler => Scheme::IfEuler,
            SchemeName::GalerkinOde => Scheme::GalerkinOde,
            SchemeName::Picard => Scheme::Picard,
        }
    }
}

/// One Fourier coefficient per component at wavevector `k` (its conjugate
/// partner at `-k` is filled in).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: Vec<i64>,
    /// `[re, im]` per component.
    pub coeff: Vec<[f64; 2]>,
}

/// A velocity or forcing field on the run grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    TaylorGreen {
        amplitude: f64,
    },
    /// Seeded solenoidal field with unit-norm shape scaled by `amplitude`.
    Random {
        amplitude: f64,
        #[serde(default = "default_slope")]
        slope: f64,
        #[serde(default = "default_cutoff")]
        cutoff: f64,
        /// Defaults to the run seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Taylor-Green plus a seeded random solenoidal perturbation of norm
    /// `perturbation`.
    PerturbedTaylorGreen {
        amplitude: f64,
        perturbation: f64,
        #[serde(default = "default_slope")]
        slope: f64,
        #[serde(default = "default_cutoff")]
        cutoff: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Modes {
        modes: Vec<ModeSpec>,
    },
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::TaylorGreen { amplitude: 1.0 }
    }
}

fn default_slope() -> f64 {
    1.0
}

fn default_cutoff() -> f64 {
    4.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingConfig {
    #[default]
    Zero,
    Steady {
        field: FieldSpec,
    },
    /// `cos(omega t) * field`.
    TimeHarmonic {
        field: FieldSpec,
        omega: f64,
    },
    Snapshots {
        times: Vec<f64>,
        fields: Vec<FieldSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    pub modes_per_axis: usize,
    pub nu: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_m")]
    pub m: u32,
    pub dt: f64,
    pub horizon: f64,
    #[serde(default)]
    pub scheme: SchemeName,
    #[serde(default = "default_true")]
    pub nonlinearity: bool,
    #[serde(default)]
    pub forcing: ForcingConfig,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub initial: FieldSpec,
    #[serde(default = "default_pad")]
    pub pad_factor: f64,
}

fn default_m() -> u32 {
    1
}

fn default_true() -> bool {
    true
}

fn default_stride() -> usize {
    1
}

fn default_pad() -> f64 {
    1.5
}

fn field_error(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {e}"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn grid(&self) -> Result<Arc<Grid>, CliError> {
        if !(2..=3).contains(&self.dim) {
            return Err(field_error("dim", format!("must be 2 or 3, got {}", self.dim)));
        }
        make_grid(self.dim, self.modes_per_axis, self.pad_factor)
            .map_err(|e| field_error("modes_per_axis", e))
    }

    pub fn viscosity(&self) -> Result<ViscosityParams, CliError> {
        let field = if !(self.nu > 0.0) {
            "nu"
        } else if !(self.epsilon >= 0.0) {
            "epsilon"
        } else {
            "m"
        };
        ViscosityParams::new(self.nu, self.epsilon, self.m, self.dim).map_err(|e| field_error(field, e))
    }

    /// Validated solver configuration and (unprojected) initial field.
    pub fn build(&self) -> Result<(SolverConfig, VectorField), CliError> {
        let grid = self.grid()?;
        let visc = self.viscosity()?;
        for (name, v) in [("dt", self.dt), ("horizon", self.horizon)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(field_error(name, format!("must be a positive number, got {v}")));
            }
        }
        if self.dt > self.horizon {
            return Err(field_error(
                "dt",
                format!("dt = {} exceeds horizon = {}", self.dt, self.horizon),
            ));
        }
        if self.snapshot_stride == 0 {
            return Err(field_error("snapshot_stride", "must be >= 1"));
        }
        let mut cfg = SolverConfig::new(&grid, visc, self.dt, self.horizon);
        cfg.scheme = self.scheme.into();
        cfg.nonlinearity_enabled = self.nonlinearity;
        cfg.snapshot_stride = self.snapshot_stride;
        cfg.seed = self.seed;
        cfg.forcing = self.forcing_spec(&grid)?;
        let scheme_field = if cfg.scheme == Scheme::GalerkinOde { "scheme" } else { "forcing" };
        cfg.validate().map_err(|e| field_error(scheme_field, e))?;
        let u0 = self.field(&self.initial, &grid, "initial")?;
        Ok((cfg, u0))
    }

    fn forcing_spec(&self, grid: &Arc<Grid>) -> Result<ForcingSpec, CliError> {
        Ok(match &self.forcing {
            ForcingConfig::Zero => ForcingSpec::Zero,
            ForcingConfig::Steady { field } => {
                ForcingSpec::Steady(self.field(field, grid, "forcing.field")?)
            }
            ForcingConfig::TimeHarmonic { field, omega } => ForcingSpec::TimeHarmonic {
                field: self.field(field, grid, "forcing.field")?,
                omega: *omega,
            },
            ForcingConfig::Snapshots { times, fields } => ForcingSpec::Snapshots {
                times: times.clone(),
                fields: fields
                    .iter()
                    .map(|f| self.field(f, grid, "forcing.fields"))
                    .collect::<Result<_, _>>()?,
            },
        })
    }

    fn field(&self, spec: &FieldSpec, grid: &Arc<Grid>, name: &str) -> Result<VectorField, CliError> {
        let err = |e: nsrg_core::Error| field_error(name, e);
        Ok(match spec {
            FieldSpec::Zero => VectorField::zeros(grid),
            FieldSpec::TaylorGreen { amplitude } => taylor_green(grid, *amplitude),
            FieldSpec::Random {
                amplitude,
                slope,
                cutoff,
                seed,
            } => random_solenoidal(grid, seed.unwrap_or(self.seed), *slope, *cutoff)
                .map_err(err)?
                .scaled(*amplitude),
            FieldSpec::PerturbedTaylorGreen {
                amplitude,
                perturbation,
                slope,
                cutoff,
                seed,
            } => {
                let noise = random_solenoidal(grid, seed.unwrap_or(self.seed), *slope, *cutoff)
                    .map_err(err)?;
                taylor_green(grid, *amplitude).axpy(*perturbation, &noise)
            }
            FieldSpec::Modes { modes } => {
                let mut u = VectorField::zeros(grid);
                for mode in modes {
                    if mode.k.len() != self.dim || mode.coeff.len() != self.dim {
                        return Err(field_error(
                            name,
                            format!("mode {:?} needs {} wavevector entries and coefficients", mode.k, self.dim),
                        ));
                    }
                    let mut k = [0i64; 3];
                    k[..self.dim].copy_from_slice(&mode.k);
                    let neg = [-k[0], -k[1], -k[2]];
                    let (Some(i), Some(j)) = (grid.index_of(k), grid.index_of(neg)) else {
                        return Err(field_error(name, format!("wavevector {:?} is not resolved", mode.k)));
                    };
                    if !grid.is_retained(i) {
                        return Err(field_error(name, format!("wavevector {:?} is a Nyquist mode", mode.k)));
                    }
                    for (c, [re, im]) in mode.coeff.iter().enumerate() {
                        let z = C64::new(*re, *im);
                        if i == j && im.abs() > 0.0 {
                            return Err(field_error(name, "the k = 0 coefficient must be real"));
                        }
                        u.component_mut(c)[i] = z;
                        u.component_mut(c)[j] = z.conj();
                    }
                }
                u
            }
        })
    }
}
