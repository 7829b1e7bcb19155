use std::path::{Path, PathBuf};
use std::time::Instant;

use nsrg_core::diagnostics::{check_apriori_bound, check_energy_estimate};
use nsrg_core::evolution::{solve, Trajectory};
use nsrg_core::hodge::recover_pressure;
use nsrg_core::nonlinear::nonlinear_term;
use nsrg_core::VectorField;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{energy_csv, write_atomic, Artifacts, RunManifest};
use crate::snapshot::Snapshot;

pub const OUTPUT_ENV: &str = "NSRG_OUTPUT_DIR";

/// Output directory: the explicit flag, else `output_dir` from the config,
/// else `$NSRG_OUTPUT_DIR/<config stem>`, else `runs/<config stem>`.
pub fn resolve_output_dir(flag: Option<&Path>, cfg: &RunConfig, config_path: &Path) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.output_dir {
        return p.clone();
    }
    let stem = config_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    let root = std::env::var_os(OUTPUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"));
    root.join(stem)
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub final_time: f64,
    pub steps: usize,
    pub snapshots: usize,
    pub energy_estimate_pass: bool,
    pub energy_max_residual: f64,
    pub energy_tol_q: f64,
    pub apriori_c1_pass: bool,
    pub apriori_c1_margin: f64,
    pub max_div_residual: f64,
}

impl RunReport {
    pub fn new(traj: &Trajectory) -> Result<Self, CliError> {
        let e = check_energy_estimate(traj)?;
        let a = check_apriori_bound(traj, 1.0)?;
        Ok(Self {
            final_time: traj.final_time(),
            steps: traj.stats.steps,
            snapshots: traj.snapshots.len(),
            energy_estimate_pass: e.pass,
            energy_max_residual: e.max_residual(),
            energy_tol_q: e.tol_q,
            apriori_c1_pass: a.pass,
            apriori_c1_margin: a.margin,
            max_div_residual: traj.ledger.div_residual.iter().copied().fold(0.0, f64::max),
        })
    }
}

/// Snapshots, optional pressure, energy CSV and report for one trajectory,
/// written under `dir`; paths returned relative to `dir`.
pub fn write_trajectory(
    dir: &Path,
    traj: &Trajectory,
    pressure: bool,
) -> Result<(Artifacts, RunReport), CliError> {
    std::fs::create_dir_all(dir.join("snapshots"))?;
    if pressure {
        std::fs::create_dir_all(dir.join("pressure"))?;
    }
    let cfg = &traj.config;
    let mut artifacts = Artifacts::default();
    for (i, (t, u)) in traj.times.iter().zip(&traj.snapshots).enumerate() {
        let rel = PathBuf::from(format!("snapshots/u_{i:05}.bin"));
        Snapshot::from_field(u, &cfg.visc, *t).write(&dir.join(&rel))?;
        artifacts.snapshots.push(rel);
        if pressure {
            let f = cfg.forcing.at(*t).unwrap_or_else(|| VectorField::zeros(&cfg.grid));
            let n = if cfg.nonlinearity_enabled {
                nonlinear_term(u)?
            } else {
                VectorField::zeros(&cfg.grid)
            };
            let p = recover_pressure(u, &f, &n)?;
            let rel = PathBuf::from(format!("pressure/p_{i:05}.bin"));
            Snapshot::from_field(&p, &cfg.visc, *t).write(&dir.join(&rel))?;
            artifacts.pressure.push(rel);
        }
    }
    write_atomic(&dir.join("energy.csv"), energy_csv(&traj.ledger).as_bytes())?;
    artifacts.energy_csv.push("energy.csv".into());
    let report = RunReport::new(traj)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&dir.join("report.json"), json.as_bytes())?;
    artifacts.reports.push("report.json".into());
    Ok((artifacts, report))
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub report: RunReport,
}

pub fn cmd_run(config_path: &Path, output_dir: Option<&Path>, pressure: bool) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let rc = RunConfig::load(config_path)?;
    let (cfg, u0) = rc.build()?;
    let dir = resolve_output_dir(output_dir, &rc, config_path);
    let traj = solve(&u0, &cfg)?;
    std::fs::create_dir_all(&dir)?;
    let (artifacts, report) = write_trajectory(&dir, &traj, pressure)?;
    RunManifest::new("run", &rc, artifacts, start.elapsed().as_secs_f64()).commit(&dir)?;
    Ok(RunOutcome { dir, report })
}
