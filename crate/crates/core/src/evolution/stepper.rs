//! Integrating-factor time stepping: the linear part `V` is integrated
//! exactly mode by mode, Runge-Kutta handles `P f - P N(u)`.

use super::{check_initial, Recorder, Scheme, SolveStats, SolverConfig, Trajectory, BLOW_UP_FACTOR};
use crate::error::{Error, Result};
use crate::nonlinear::projected_nonlinear_term;
use crate::spectral::{l2_norm, SpectralField, VectorField};

/// Caches `exp(-sigma h)` and `exp(-sigma h / 2)` for the current step size.
pub struct Stepper<'a> {
    cfg: &'a SolverConfig,
    sigma: Vec<f64>,
    h: f64,
    full: Vec<f64>,
    half: Vec<f64>,
    pub rhs_evaluations: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(cfg: &'a SolverConfig) -> Self {
        let grid = &cfg.grid;
        let sigma = (0..grid.len())
            .map(|i| cfg.visc.symbol(grid.k2(i)))
            .collect();
        let mut s = Self {
            cfg,
            sigma,
            h: f64::NAN,
            full: Vec::new(),
            half: Vec::new(),
            rhs_evaluations: 0,
        };
        s.set_step(cfg.dt);
        s
    }

    fn set_step(&mut self, h: f64) {
        if h == self.h {
            return;
        }
        self.h = h;
        self.full = self.sigma.iter().map(|s| (-s * h).exp()).collect();
        self.half = self.sigma.iter().map(|s| (-s * 0.5 * h).exp()).collect();
    }

    /// `P f(t) - P N(u)`; `None` when identically zero.
    fn rhs(&mut self, t: f64, u: &VectorField) -> Result<Option<VectorField>> {
        let mut out = self.cfg.projected_forcing(t);
        if self.cfg.nonlinearity_enabled {
            self.rhs_evaluations += 1;
            let pn = projected_nonlinear_term(u)?;
            out = Some(match out {
                Some(f) => &f - &pn,
                None => pn.scaled(-1.0),
            });
        }
        Ok(out)
    }

    /// Advance `u` from `t` by `h`.
    pub fn advance(&mut self, u: &VectorField, t: f64, h: f64) -> Result<VectorField> {
        self.set_step(h);
        let full = self.full.clone();
        let half = self.half.clone();
        let e1 = |v: &VectorField| v.map_modes(|i| full[i]);
        let e2 = |v: &VectorField| v.map_modes(|i| half[i]);
        match self.cfg.scheme {
            Scheme::IfEuler => {
                let k1 = self.rhs(t, u)?;
                Ok(match k1 {
                    Some(k1) => e1(&u.axpy(h, &k1)),
                    None => e1(u),
                })
            }
            _ => {
                // No forcing and no nonlinearity: the factor alone is exact.
                let Some(k1) = self.rhs(t, u)? else {
                    return Ok(e1(u));
                };
                let zero = || VectorField::zeros(&self.cfg.grid);
                let u2 = e2(&u.axpy(0.5 * h, &k1));
                let k2 = self.rhs(t + 0.5 * h, &u2)?.unwrap_or_else(zero);
                let eu = e2(u);
                let u3 = eu.axpy(0.5 * h, &k2);
                let k3 = self.rhs(t + 0.5 * h, &u3)?.unwrap_or_else(zero);
                let u4 = e2(&eu.axpy(h, &k3));
                let k4 = self.rhs(t + h, &u4)?.unwrap_or_else(zero);
                let a = e1(&u.axpy(h / 6.0, &k1));
                let b = e2(&(&k2 + &k3)).scaled(h / 3.0);
                Ok((&a + &b).axpy(h / 6.0, &k4))
            }
        }
    }
}

/// One step of size `cfg.dt` with the configured scheme (`IfRk4` or
/// `IfEuler`; other schemes step with `IfRk4`).
pub fn step(state: &VectorField, t: f64, cfg: &SolverConfig) -> Result<VectorField> {
    let mut s = Stepper::new(cfg);
    let next = s.advance(state, t, cfg.dt)?;
    if !next.is_finite() {
        return Err(Error::BlowUp {
            time: t + cfg.dt,
            last_good_time: t,
            reason: "non-finite coefficient".into(),
        });
    }
    Ok(next)
}

/// Integrate from `leray_project(u0)` to `cfg.horizon`.
pub fn run_simulation(u0: &VectorField, cfg: &SolverConfig) -> Result<Trajectory> {
    let mut u = check_initial(u0, cfg)?;
    let n_steps = cfg.n_steps();
    let norm0 = l2_norm(&u);
    let mut rec = Recorder::new(cfg);
    rec.record(0, 0.0, &u, cfg.forcing.at(0.0).as_ref(), false);
    let mut stepper = Stepper::new(cfg);
    for n in 0..n_steps {
        let t = cfg.node_time(n);
        let t_next = cfg.node_time(n + 1);
        u = stepper.advance(&u, t, t_next - t)?;
        let norm = l2_norm(&u);
        if !u.is_finite() || !norm.is_finite() {
            return Err(Error::BlowUp {
                time: t_next,
                last_good_time: t,
                reason: "non-finite coefficient".into(),
            });
        }
        if norm0 > 0.0 && norm > BLOW_UP_FACTOR * norm0 {
            return Err(Error::BlowUp {
                time: t_next,
                last_good_time: t,
                reason: format!("|u| = {norm:e} exceeds {BLOW_UP_FACTOR:e} x |u0|"),
            });
        }
        rec.record(n + 1, t_next, &u, cfg.forcing.at(t_next).as_ref(), n + 1 == n_steps);
    }
    let stats = SolveStats {
        steps: n_steps,
        rhs_evaluations: stepper.rhs_evaluations,
        ..Default::default()
    };
    Ok(rec.finish(cfg, stats))
}
