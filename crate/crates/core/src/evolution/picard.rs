//! Successive approximation of the mild equation
//! `u(t) = exp(-tV) u0 + int_0^t exp(-(t-s)V) (P f - P N(u))(s) ds`
//! on a uniform time mesh, with the Duhamel integral evaluated by
//! [`Quadrature::Cubic`].

use super::semigroup::{initial_value_potential, volume_potential_path, Quadrature};
use super::{check_initial, Recorder, SolveStats, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::nonlinear::projected_nonlinear_term;
use crate::spectral::{l2_norm, VectorField};

struct Segment {
    /// States at the mesh nodes after the start node.
    nodes: Vec<VectorField>,
}

struct Picard<'a> {
    cfg: &'a SolverConfig,
    h: f64,
    tol: f64,
    max_iters: usize,
    stats: SolveStats,
}

enum Attempt {
    Converged(Vec<VectorField>),
    Stalled,
}

impl Picard<'_> {
    fn forcing(&self, t: f64) -> VectorField {
        self.cfg
            .projected_forcing(t)
            .unwrap_or_else(|| VectorField::zeros(&self.cfg.grid))
    }

    /// Fixed-point iteration on nodes `start..=start + n` from `u_start`.
    fn attempt(&mut self, start: usize, n: usize, u_start: &VectorField) -> Result<Attempt> {
        let t = |j: usize| (start + j) as f64 * self.h;
        let linear: Vec<VectorField> = (0..=n)
            .map(|j| initial_value_potential(u_start, j as f64 * self.h, &self.cfg.visc))
            .collect::<Result<_>>()?;
        let forcing: Vec<VectorField> = (0..=n).map(|j| self.forcing(t(j))).collect();
        let push = |sources: &[VectorField]| -> Result<Vec<VectorField>> {
            let path = volume_potential_path(sources, self.h, &self.cfg.visc, Quadrature::Cubic)?;
            Ok(linear.iter().zip(&path).map(|(l, p)| l + p).collect())
        };

        let mut iterate = push(&forcing)?;
        let mut previous = f64::INFINITY;
        for iter in 1..=self.max_iters {
            self.stats.iterations += 1;
            let sources = if self.cfg.nonlinearity_enabled {
                iterate
                    .iter()
                    .zip(&forcing)
                    .map(|(u, f)| {
                        self.stats.rhs_evaluations += 1;
                        Ok(f - &projected_nonlinear_term(u)?)
                    })
                    .collect::<Result<Vec<_>>>()?
            } else {
                forcing.clone()
            };
            let next = push(&sources)?;
            let mut increment = 0.0f64;
            let mut scale = 1.0f64;
            for (a, b) in next.iter().zip(&iterate) {
                increment = increment.max(l2_norm(&(a - b)));
                scale = scale.max(l2_norm(a));
            }
            iterate = next;
            if !increment.is_finite() {
                return Ok(Attempt::Stalled);
            }
            if increment <= self.tol * scale {
                self.stats.residual = self.stats.residual.max(increment);
                iterate.remove(0);
                return Ok(Attempt::Converged(iterate));
            }
            if iter >= 3 && increment > previous {
                return Ok(Attempt::Stalled);
            }
            previous = increment;
        }
        Ok(Attempt::Stalled)
    }

    fn segment(&mut self, start: usize, n: usize, u_start: &VectorField) -> Result<Segment> {
        match self.attempt(start, n, u_start)? {
            Attempt::Converged(nodes) => Ok(Segment { nodes }),
            Attempt::Stalled if n < 2 => Err(Error::PicardDivergence {
                start: start as f64 * self.h,
                end: (start + n) as f64 * self.h,
                iterations: self.max_iters,
            }),
            Attempt::Stalled => {
                self.stats.bisections += 1;
                let half = n / 2;
                let mut left = self.segment(start, half, u_start)?;
                let mid = left.nodes.last().expect("half >= 1").clone();
                let right = self.segment(start + half, n - half, &mid)?;
                left.nodes.extend(right.nodes);
                Ok(left)
            }
        }
    }
}

/// Solve on the uniform mesh `t_j = j * horizon / n_steps`. The whole
/// horizon is attempted first; an interval whose increments grow (after the
/// third iteration) or that reaches `max_iters` is bisected and the halves
/// are solved in turn. Convergence: largest node increment
/// `<= tol * max(1, max |u_j|)`.
pub fn solve_picard(
    u0: &VectorField,
    cfg: &SolverConfig,
    tol: f64,
    max_iters: usize,
) -> Result<Trajectory> {
    let u = check_initial(u0, cfg)?;
    if !(tol > 0.0) || max_iters == 0 {
        return Err(Error::InvalidParams(
            "Picard needs tol > 0 and max_iters >= 1".into(),
        ));
    }
    let n_steps = cfg.n_steps();
    let h = cfg.horizon / n_steps as f64;
    let mut picard = Picard {
        cfg,
        h,
        tol,
        max_iters,
        stats: SolveStats::default(),
    };
    let seg = picard.segment(0, n_steps, &u)?;

    let mut rec = Recorder::new(cfg);
    rec.record(0, 0.0, &u, cfg.forcing.at(0.0).as_ref(), false);
    for (j, state) in seg.nodes.iter().enumerate() {
        let node = j + 1;
        let t = if node == n_steps { cfg.horizon } else { node as f64 * h };
        rec.record(node, t, state, cfg.forcing.at(t).as_ref(), node == n_steps);
    }
    let mut stats = picard.stats;
    stats.steps = n_steps;
    Ok(rec.finish(cfg, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{run_simulation, ForcingSpec};
    use crate::spectral::{make_grid, random_solenoidal, taylor_green, SpectralField, ViscosityParams};

    #[test]
    fn taylor_green_converges_immediately() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let visc = ViscosityParams::new(1.0, 0.0, 1, 2).unwrap();
        let cfg = SolverConfig::new(&g, visc, 0.05, 1.0);
        let tg = taylor_green(&g, 1.0);
        let traj = solve_picard(&tg, &cfg, 1e-12, 50).unwrap();
        assert!(traj.stats.iterations <= 3);
        let exact = tg.scaled((-2.0f64).exp());
        assert!(l2_norm(&(traj.final_state() - &exact)) < 1e-13);
    }

    #[test]
    fn zero_data_single_iteration() {
        let g = make_grid(2, 8, 1.5).unwrap();
        let visc = ViscosityParams::new(1.0, 0.0, 1, 2).unwrap();
        let cfg = SolverConfig::new(&g, visc, 0.1, 1.0);
        let traj = solve_picard(&VectorField::zeros(&g), &cfg, 1e-12, 50).unwrap();
        assert_eq!(traj.stats.iterations, 1);
        assert_eq!(traj.final_state().max_abs(), 0.0);
    }

    #[test]
    fn agrees_with_stepper_under_forcing() {
        let g = make_grid(2, 8, 1.5).unwrap();
        let visc = ViscosityParams::new(0.2, 0.01, 1, 2).unwrap();
        let mut cfg = SolverConfig::new(&g, visc, 0.01, 0.5);
        cfg.snapshot_stride = 10;
        let f = random_solenoidal(&g, 4, 1.0, 2.0).unwrap();
        cfg.forcing = ForcingSpec::TimeHarmonic { field: f, omega: 3.0 };
        let u0 = random_solenoidal(&g, 7, 1.0, 2.0).unwrap();
        let a = solve_picard(&u0, &cfg, 1e-12, 100).unwrap();
        let b = run_simulation(&u0, &cfg).unwrap();
        assert_eq!(a.times.len(), b.times.len());
        assert!(l2_norm(&(a.final_state() - b.final_state())) < 1e-7);
    }

    #[test]
    fn large_data_bisects() {
        let g = make_grid(2, 8, 1.5).unwrap();
        let visc = ViscosityParams::new(0.05, 0.0, 1, 2).unwrap();
        let cfg = SolverConfig::new(&g, visc, 0.01, 2.0);
        let u0 = random_solenoidal(&g, 11, 0.0, 2.0).unwrap().scaled(5.0);
        let a = solve_picard(&u0, &cfg, 1e-12, 8).unwrap();
        assert!(a.stats.bisections > 0);
        let b = run_simulation(&u0, &cfg).unwrap();
        let rel = l2_norm(&(a.final_state() - b.final_state())) / l2_norm(b.final_state());
        assert!(rel < 1e-6, "rel {rel}");
    }
}
