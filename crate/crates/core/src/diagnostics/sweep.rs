//! Convergence study `eps -> 0` over a family of runs sharing data, grid and dt.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{solve, SolverConfig, Trajectory};
use crate::spectral::{gradient_sq, l2_norm, sobolev_norm, VectorField, ViscosityParams};

#[derive(Clone, Debug)]
pub struct SweepResult {
    /// Strictly descending.
    pub epsilons: Vec<f64>,
    /// `sup_t |u_eps - u_delta|` for consecutive pairs.
    pub pairwise_sup_diff: Vec<f64>,
    /// `int |grad (u_eps - u_delta)|^2 dt` for consecutive pairs.
    pub pairwise_h1_int_diff: Vec<f64>,
    /// Least-squares slope of `log sup_diff` against `log |eps - delta|`
    /// over the last `ceil(pairs / 2)` pairs.
    pub fitted_rate: f64,
    /// Smallest `C` with `sup_diff^2 <= C |eps - delta|` for every pair.
    pub certified_constant: f64,
    /// `sup_t |u_eps|_{H^m}` per run.
    pub hm_sup: Vec<f64>,
    pub runs: Vec<Trajectory>,
}

impl SweepResult {
    /// Run at the smallest `eps`.
    pub fn reference_limit(&self) -> &Trajectory {
        self.runs.last().expect("sweep has runs")
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.epsilons.windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// `sup_diff` decreases along the sweep up to a factor `1 + noise`.
    pub fn is_monotone(&self, noise: f64) -> bool {
        self.pairwise_sup_diff
            .windows(2)
            .all(|w| w[1] <= (1.0 + noise) * w[0])
    }

    /// Ratio of the largest to the smallest `sup_t |u_eps|_{H^m}`; values near
    /// 1 indicate the `H^m` bound is uniform over the sweep.
    pub fn hm_spread(&self) -> f64 {
        let max = self.hm_sup.iter().copied().fold(0.0, f64::max);
        let min = self.hm_sup.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Whether `sup_diff^2 <= c |eps - delta|` for every pair.
    pub fn certifies(&self, c: f64) -> bool {
        self.pairwise_sup_diff
            .iter()
            .zip(self.gaps())
            .all(|(d, g)| d * d <= c * g)
    }
}

/// `(sup_t |a - b|, int |grad (a - b)|^2 dt)` over shared snapshot times.
pub fn trajectory_difference(a: &Trajectory, b: &Trajectory) -> Result<(f64, f64)> {
    let same_times = a.times.len() == b.times.len()
        && a
            .times
            .iter()
            .zip(&b.times)
            .all(|(s, t)| (s - t).abs() <= 1e-12 * t.abs().max(1.0));
    if !same_times {
        return Err(Error::InvalidParams(
            "trajectories do not share snapshot times".into(),
        ));
    }
    let mut sup = 0.0f64;
    let mut grad = Vec::with_capacity(a.times.len());
    for (u, v) in a.snapshots.iter().zip(&b.snapshots) {
        let d = u - v;
        sup = sup.max(l2_norm(&d));
        grad.push(gradient_sq(&d));
    }
    let integral = a
        .times
        .windows(2)
        .zip(grad.windows(2))
        .map(|(t, g)| 0.5 * (t[1] - t[0]) * (g[0] + g[1]))
        .sum();
    Ok((sup, integral))
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Run `base_cfg` at every `eps` (in parallel on the current rayon pool) from
/// the same initial data and compare consecutive runs.
pub fn epsilon_sweep(
    u0: &VectorField,
    base_cfg: &SolverConfig,
    epsilons: &[f64],
) -> Result<SweepResult> {
    if epsilons.len() < 4 {
        return Err(Error::InvalidParams(format!(
            "a sweep needs at least 4 epsilons, got {}",
            epsilons.len()
        )));
    }
    if epsilons.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParams("epsilons must be positive".into()));
    }
    if epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParams(
            "epsilons must be strictly descending".into(),
        ));
    }
    let dim = base_cfg.grid.dim();
    let results: Vec<Result<Trajectory>> = epsilons
        .par_iter()
        .map(|&eps| {
            let wrap = |e: Error| Error::SweepRun {
                epsilon: eps,
                source: Box::new(e),
            };
            let mut cfg = base_cfg.clone();
            cfg.visc = ViscosityParams::new(cfg.visc.nu, eps, cfg.visc.m, dim).map_err(wrap)?;
            solve(u0, &cfg).map_err(wrap)
        })
        .collect();
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut pairwise_sup_diff = Vec::new();
    let mut pairwise_h1_int_diff = Vec::new();
    for w in runs.windows(2) {
        let (sup, h1) = trajectory_difference(&w[0], &w[1])?;
        pairwise_sup_diff.push(sup);
        pairwise_h1_int_diff.push(h1);
    }
    let gaps: Vec<f64> = epsilons.windows(2).map(|w| w[0] - w[1]).collect();
    let tail = pairwise_sup_diff.len().div_ceil(2);
    let start = pairwise_sup_diff.len() - tail;
    let lx: Vec<f64> = gaps[start..].iter().map(|g| g.ln()).collect();
    let ly: Vec<f64> = pairwise_sup_diff[start..].iter().map(|d| d.ln()).collect();
    let fitted_rate = slope(&lx, &ly);
    let certified_constant = pairwise_sup_diff
        .iter()
        .zip(&gaps)
        .map(|(d, g)| d * d / g)
        .fold(0.0, f64::max);
    let m = base_cfg.visc.m as f64;
    let hm_sup = runs
        .iter()
        .map(|r| {
            r.snapshots
                .iter()
                .map(|u| sobolev_norm(u, m))
                .try_fold(0.0f64, |acc, n| n.map(|n| acc.max(n)))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        epsilons: epsilons.to_vec(),
        pairwise_sup_diff,
        pairwise_h1_int_diff,
        fitted_rate,
        certified_constant,
        hm_sup,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::run_simulation;
    use crate::spectral::{make_grid, random_solenoidal, taylor_green, SpectralField};

    #[test]
    fn identical_runs_have_zero_difference() {
        let g = make_grid(2, 8, 1.5).unwrap();
        let visc = ViscosityParams::new(0.1, 0.01, 1, 2).unwrap();
        let cfg = SolverConfig::new(&g, visc, 0.01, 0.2);
        let u0 = random_solenoidal(&g, 1, 1.0, 2.0).unwrap();
        let a = run_simulation(&u0, &cfg).unwrap();
        let b = run_simulation(&u0, &cfg).unwrap();
        assert_eq!(trajectory_difference(&a, &b).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn rejects_bad_epsilons() {
        let g = make_grid(2, 8, 1.5).unwrap();
        let cfg = SolverConfig::new(&g, ViscosityParams::new(0.1, 0.0, 1, 2).unwrap(), 0.1, 0.2);
        let u0 = taylor_green(&g, 1.0);
        assert!(epsilon_sweep(&u0, &cfg, &[0.1, 0.01, 0.001]).is_err());
        assert!(epsilon_sweep(&u0, &cfg, &[0.1, 0.01, 0.01, 0.001]).is_err());
        assert!(epsilon_sweep(&u0, &cfg, &[0.1, 0.01, 0.001, 0.0]).is_err());
    }

    #[test]
    fn single_shell_energy_is_monotone_in_epsilon() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let visc = ViscosityParams::new(0.5, 0.0, 1, 2).unwrap();
        let mut cfg = SolverConfig::new(&g, visc, 0.01, 0.5);
        cfg.snapshot_stride = 10;
        let tg = taylor_green(&g, 1.0);
        let eps = [0.2, 0.1, 0.05, 0.025];
        let s = epsilon_sweep(&tg, &cfg, &eps).unwrap();
        let finals: Vec<f64> = s.runs.iter().map(|r| l2_norm(r.final_state())).collect();
        assert!(finals.windows(2).all(|w| w[0] <= w[1]));
        for (e, f) in eps.iter().zip(&finals) {
            let exact = l2_norm(&tg) * (-(2.0 * 0.5 + 2.0 * e) * 0.5f64).exp();
            assert!((f - exact).abs() < 1e-12);
        }
        // Pure decay: the differences are those of the decay factors; slope
        // from the closed form sampled on the same snapshot times.
        assert!((s.fitted_rate - 0.946_011_643_581_7).abs() < 1e-9, "{}", s.fitted_rate);
        assert!(s.is_monotone(0.1));
        assert!(s.certifies(s.certified_constant));
        assert!(s.hm_spread() >= 1.0);
        assert!(s.reference_limit().final_state().max_abs() > 0.0);
    }

    #[test]
    fn failing_run_names_its_epsilon() {
        let g = make_grid(3, 8, 1.5).unwrap();
        let visc = ViscosityParams::new(0.1, 0.0, 1, 3).unwrap();
        let cfg = SolverConfig::new(&g, visc, 0.1, 0.2);
        // m = 1 violates the order condition in 3-D once eps > 0.
        let u0 = VectorField::zeros(&g);
        match epsilon_sweep(&u0, &cfg, &[0.4, 0.3, 0.2, 0.1]) {
            Err(Error::SweepRun { epsilon, .. }) => assert_eq!(epsilon, 0.4),
            other => panic!("{other:?}"),
        }
    }
}
