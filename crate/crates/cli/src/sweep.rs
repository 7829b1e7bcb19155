use std::path::{Path, PathBuf};
use std::time::Instant;

use nsrg_core::diagnostics::{epsilon_sweep, SweepResult};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{sweep_pairs_csv, sweep_summary_csv, write_atomic, Artifacts, RunManifest};
use crate::run::{resolve_output_dir, write_trajectory};

/// Minimum fitted rate of `sup_t |u_eps - u_delta|` against `|eps - delta|`.
pub const RATE_GATE: f64 = 0.45;

pub const DEFAULT_EPSILONS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

pub fn check_epsilons(epsilons: &[f64]) -> Result<(), CliError> {
    if epsilons.len() < 4 {
        return Err(CliError::Config(format!(
            "--epsilons needs at least 4 values, got {}",
            epsilons.len()
        )));
    }
    if let Some(e) = epsilons.iter().find(|&&e| !(e > 0.0) || !e.is_finite()) {
        return Err(CliError::Config(format!("--epsilons: {e} is not positive")));
    }
    if let Some(w) = epsilons.windows(2).find(|w| !(w[1] < w[0])) {
        return Err(CliError::Config(format!(
            "--epsilons: non-descending list ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

pub fn run_dir_name(index: usize, epsilon: f64) -> String {
    format!("eps_{index:02}_{epsilon:e}")
}

#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub dir: PathBuf,
    pub runs: Vec<(f64, PathBuf)>,
}

pub fn plan_sweep(
    config_path: &Path,
    epsilons: &[f64],
    output_dir: Option<&Path>,
) -> Result<(RunConfig, SweepPlan), CliError> {
    check_epsilons(epsilons)?;
    let rc = RunConfig::load(config_path)?;
    // Validate every run's parameters up front.
    for &eps in epsilons {
        let mut c = rc.clone();
        c.epsilon = eps;
        c.build()?;
    }
    let dir = resolve_output_dir(output_dir, &rc, config_path);
    let runs = epsilons
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, dir.join(run_dir_name(i, e))))
        .collect();
    Ok((rc, SweepPlan { dir, runs }))
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub dir: PathBuf,
    pub result: SweepResult,
    pub pass: bool,
}

/// Run the sweep on a pool of `jobs` threads (default: logical cores).
pub fn cmd_sweep(
    config_path: &Path,
    epsilons: &[f64],
    output_dir: Option<&Path>,
    jobs: Option<usize>,
) -> Result<SweepOutcome, CliError> {
    let start = Instant::now();
    let (rc, plan) = plan_sweep(config_path, epsilons, output_dir)?;
    let (cfg, u0) = rc.build()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Failed(format!("thread pool: {e}")))?;
    let result = pool.install(|| epsilon_sweep(&u0, &cfg, epsilons))?;

    std::fs::create_dir_all(&plan.dir)?;
    let mut artifacts = Artifacts::default();
    for ((_, run_dir), traj) in plan.runs.iter().zip(&result.runs) {
        std::fs::create_dir_all(run_dir)?;
        let (a, _) = write_trajectory(run_dir, traj, false)?;
        let rel = run_dir.strip_prefix(&plan.dir).expect("run dir under sweep dir");
        artifacts.energy_csv.extend(a.energy_csv.iter().map(|p| rel.join(p)));
        artifacts.snapshots.extend(a.snapshots.iter().map(|p| rel.join(p)));
        artifacts.reports.extend(a.reports.iter().map(|p| rel.join(p)));
    }
    write_atomic(&plan.dir.join("sweep.csv"), sweep_pairs_csv(&result).as_bytes())?;
    write_atomic(
        &plan.dir.join("sweep_summary.csv"),
        sweep_summary_csv(&result, RATE_GATE).as_bytes(),
    )?;
    artifacts.reports.push("sweep.csv".into());
    artifacts.reports.push("sweep_summary.csv".into());
    let mut manifest_cfg = rc.clone();
    manifest_cfg.output_dir = Some(plan.dir.clone());
    RunManifest::new("sweep", &manifest_cfg, artifacts, start.elapsed().as_secs_f64())
        .commit(&plan.dir)?;
    let pass = result.fitted_rate >= RATE_GATE;
    Ok(SweepOutcome {
        dir: plan.dir,
        result,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_list_checks() {
        assert!(check_epsilons(&DEFAULT_EPSILONS).is_ok());
        let e = check_epsilons(&[0.1, 0.01, 0.01, 0.001]).unwrap_err();
        assert!(e.to_string().contains("non-descending"));
        assert!(check_epsilons(&[0.1, 0.01, 0.001]).is_err());
        assert!(check_epsilons(&[0.1, 0.01, 0.001, -1.0]).is_err());
        assert_eq!(run_dir_name(2, 0.01), "eps_02_1e-2");
    }
}
