//! Time evolution of `u' + V u + P N(u) = P f` with `V = eps (-Lap)^m - nu Lap`.
//!
//! Three independent routes produce a [`Trajectory`]:
//!
//! * [`run_simulation`]: integrating-factor Runge-Kutta (Lawson RK4 or
//!   exponential Euler), the production path,
//! * [`run_galerkin_oracle`]: the coefficient ODE system in the eigenbasis of
//!   `V + Id`, integrated with adaptive Dormand-Prince,
//! * [`solve_picard`]: successive approximation of the mild (Duhamel)
//!   equation with interval bisection when the iteration stalls.

use std::sync::Arc;

use crate::diagnostics::EnergyLedger;
use crate::error::{Error, Result};
use crate::hodge::leray_project;
use crate::spectral::{same_grid, Grid, SpectralField, VectorField, ViscosityParams};

mod galerkin;
mod ode;
mod picard;
mod semigroup;
mod stepper;

pub use galerkin::{
    assemble_tensor, run_galerkin_oracle, BasisMode, GalerkinState, QuadraticTensor,
    GALERKIN_MAX_MODES, GALERKIN_TOL,
};
pub use ode::{dopri5, OdeStats};
pub use picard::solve_picard;
pub use semigroup::{
    initial_value_potential, semigroup_factor, volume_potential, volume_potential_path,
    Quadrature,
};
pub use stepper::{run_simulation, step, Stepper};

/// Norm growth (relative to the initial state) treated as blow-up.
pub const BLOW_UP_FACTOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    IfRk4,
    IfEuler,
    GalerkinOde,
    Picard,
}

/// Body force `f(t)`.
#[derive(Clone, Debug)]
pub enum ForcingSpec {
    Zero,
    Steady(VectorField),
    /// `cos(omega t) * field`.
    TimeHarmonic { field: VectorField, omega: f64 },
    /// Piecewise-linear interpolation between snapshots, held constant
    /// outside `[times[0], times[last]]`.
    Snapshots {
        times: Vec<f64>,
        fields: Vec<VectorField>,
    },
}

impl ForcingSpec {
    pub fn is_zero(&self) -> bool {
        matches!(self, ForcingSpec::Zero)
    }

    pub fn at(&self, t: f64) -> Option<VectorField> {
        match self {
            ForcingSpec::Zero => None,
            ForcingSpec::Steady(f) => Some(f.clone()),
            ForcingSpec::TimeHarmonic { field, omega } => Some(field.scaled((omega * t).cos())),
            ForcingSpec::Snapshots { times, fields } => {
                let last = times.len() - 1;
                if t <= times[0] {
                    return Some(fields[0].clone());
                }
                if t >= times[last] {
                    return Some(fields[last].clone());
                }
                let j = times.partition_point(|&s| s <= t) - 1;
                let w = (t - times[j]) / (times[j + 1] - times[j]);
                Some(fields[j].scaled(1.0 - w).axpy(w, &fields[j + 1]))
            }
        }
    }

    fn validate(&self, grid: &Arc<Grid>) -> Result<()> {
        let check = |f: &VectorField| {
            if same_grid(f.grid(), grid) {
                Ok(())
            } else {
                Err(Error::InvalidConfig("forcing field is not on the run grid".into()))
            }
        };
        match self {
            ForcingSpec::Zero => Ok(()),
            ForcingSpec::Steady(f) => check(f),
            ForcingSpec::TimeHarmonic { field, omega } => {
                if !omega.is_finite() {
                    return Err(Error::InvalidConfig("forcing omega must be finite".into()));
                }
                check(field)
            }
            ForcingSpec::Snapshots { times, fields } => {
                if times.is_empty() || times.len() != fields.len() {
                    return Err(Error::InvalidConfig(
                        "forcing snapshots need matching, non-empty times and fields".into(),
                    ));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidConfig(
                        "forcing snapshot times must be strictly increasing".into(),
                    ));
                }
                fields.iter().try_for_each(check)
            }
        }
    }
}

/// Data and numerical parameters of one run.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub grid: Arc<Grid>,
    pub visc: ViscosityParams,
    pub dt: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    pub nonlinearity_enabled: bool,
    pub forcing: ForcingSpec,
    pub snapshot_stride: usize,
    pub seed: u64,
}

impl SolverConfig {
    /// Unforced nonlinear IF-RK4 run with a snapshot every step.
    pub fn new(grid: &Arc<Grid>, visc: ViscosityParams, dt: f64, horizon: f64) -> Self {
        Self {
            grid: grid.clone(),
            visc,
            dt,
            horizon,
            scheme: Scheme::IfRk4,
            nonlinearity_enabled: true,
            forcing: ForcingSpec::Zero,
            snapshot_stride: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ViscosityParams::new(
            self.visc.nu,
            self.visc.epsilon,
            self.visc.m,
            self.grid.dim(),
        )?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        if self.dt > self.horizon {
            return Err(Error::InvalidConfig(format!(
                "dt = {} exceeds horizon = {}",
                self.dt, self.horizon
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidConfig("snapshot_stride must be >= 1".into()));
        }
        if self.scheme == Scheme::GalerkinOde && self.grid.modes_per_axis() > GALERKIN_MAX_MODES {
            return Err(Error::BasisTooLarge {
                modes: self.grid.modes_per_axis(),
                limit: GALERKIN_MAX_MODES,
            });
        }
        self.forcing.validate(&self.grid)
    }

    /// Number of steps of size `dt` (the last one possibly shorter) to reach
    /// the horizon.
    pub fn n_steps(&self) -> usize {
        ((self.horizon / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    /// Time of mesh node `n`.
    pub fn node_time(&self, n: usize) -> f64 {
        if n >= self.n_steps() {
            self.horizon
        } else {
            n as f64 * self.dt
        }
    }

    /// `P f(t)`, `None` when unforced.
    pub(crate) fn projected_forcing(&self, t: f64) -> Option<VectorField> {
        self.forcing.at(t).map(|f| leray_project(&f))
    }
}

/// Counters reported by the solvers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub steps: usize,
    pub rhs_evaluations: usize,
    /// Picard: iterations summed over all sub-intervals.
    pub iterations: usize,
    /// Picard: number of interval bisections.
    pub bisections: usize,
    /// Picard: largest final increment over the sub-intervals.
    pub residual: f64,
}

/// Snapshots of a run plus its energy ledger.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<VectorField>,
    pub ledger: EnergyLedger,
    pub config: SolverConfig,
    pub stats: SolveStats,
}

impl Trajectory {
    pub fn final_state(&self) -> &VectorField {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one snapshot")
    }
}

/// Collects snapshots every `stride` nodes (and always the last) and a
/// ledger entry at every node.
pub(crate) struct Recorder {
    stride: usize,
    times: Vec<f64>,
    snapshots: Vec<VectorField>,
    ledger: EnergyLedger,
    visc: ViscosityParams,
}

impl Recorder {
    pub(crate) fn new(cfg: &SolverConfig) -> Self {
        Self {
            stride: cfg.snapshot_stride,
            times: Vec::new(),
            snapshots: Vec::new(),
            ledger: EnergyLedger::default(),
            visc: cfg.visc,
        }
    }

    pub(crate) fn record(&mut self, node: usize, t: f64, u: &VectorField, f: Option<&VectorField>, last: bool) {
        self.ledger.record(t, u, f, &self.visc);
        if node.is_multiple_of(self.stride) || last {
            self.times.push(t);
            self.snapshots.push(u.clone());
        }
    }

    pub(crate) fn finish(self, cfg: &SolverConfig, stats: SolveStats) -> Trajectory {
        Trajectory {
            times: self.times,
            snapshots: self.snapshots,
            ledger: self.ledger,
            config: cfg.clone(),
            stats,
        }
    }
}

pub(crate) fn check_initial(u0: &VectorField, cfg: &SolverConfig) -> Result<VectorField> {
    cfg.validate()?;
    if !same_grid(u0.grid(), &cfg.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(leray_project(u0))
}

/// Dispatch on `cfg.scheme`. Picard runs use `tol = 1e-12` and at most 200
/// iterations per interval.
pub fn solve(u0: &VectorField, cfg: &SolverConfig) -> Result<Trajectory> {
    match cfg.scheme {
        Scheme::IfRk4 | Scheme::IfEuler => run_simulation(u0, cfg),
        Scheme::GalerkinOde => run_galerkin_oracle(u0, cfg),
        Scheme::Picard => solve_picard(u0, cfg, 1e-12, 200),
    }
}
