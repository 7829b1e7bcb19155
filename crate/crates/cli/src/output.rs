//! CSV writers and the run manifest.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use nsrg_core::diagnostics::{EnergyLedger, SweepResult};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const ENERGY_HEADER: &str = "t,l2_sq,dirichlet,visc_dissip_cum,work_cum,div_residual";

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn energy_csv(ledger: &EnergyLedger) -> String {
    let mut s = String::from(ENERGY_HEADER);
    s.push('\n');
    for i in 0..ledger.len() {
        let row = [
            ledger.times[i],
            ledger.l2_sq[i],
            ledger.dirichlet[i],
            ledger.visc_dissip_cum[i],
            ledger.work_cum[i],
            ledger.div_residual[i],
        ];
        let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn sweep_pairs_csv(result: &SweepResult) -> String {
    let mut s = String::from("epsilon_a,epsilon_b,gap,sup_l2_diff,h1_int_diff\n");
    for (i, w) in result.epsilons.windows(2).enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            num(w[0]),
            num(w[1]),
            num(w[0] - w[1]),
            num(result.pairwise_sup_diff[i]),
            num(result.pairwise_h1_int_diff[i])
        );
    }
    s
}

pub fn sweep_summary_csv(result: &SweepResult, gate: f64) -> String {
    let mut s = String::from("key,value\n");
    let _ = writeln!(s, "fitted_rate,{}", num(result.fitted_rate));
    let _ = writeln!(s, "rate_gate,{}", num(gate));
    let _ = writeln!(
        s,
        "rate_gate_status,{}",
        if result.fitted_rate >= gate { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(s, "certified_constant,{}", num(result.certified_constant));
    let _ = writeln!(s, "monotone_within_10pct,{}", result.is_monotone(0.1));
    let _ = writeln!(s, "hm_spread,{}", num(result.hm_spread()));
    for (e, h) in result.epsilons.iter().zip(&result.hm_sup) {
        let _ = writeln!(s, "hm_sup[{}],{}", num(*e), num(*h));
    }
    s
}

/// Write `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        use std::io::Write;
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub energy_csv: Vec<PathBuf>,
    pub snapshots: Vec<PathBuf>,
    pub pressure: Vec<PathBuf>,
    pub reports: Vec<PathBuf>,
}

impl Artifacts {
    pub fn all(&self) -> impl Iterator<Item = &PathBuf> {
        self.energy_csv
            .iter()
            .chain(&self.snapshots)
            .chain(&self.pressure)
            .chain(&self.reports)
    }
}

/// Commit marker of a run: written last, lists every artifact (relative to
/// the manifest's directory).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: RunConfig,
    pub artifacts: Artifacts,
    pub version: String,
    pub wall_clock_seconds: f64,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig, artifacts: Artifacts, wall_clock_seconds: f64) -> Self {
        Self {
            command: command.into(),
            config: config.clone(),
            artifacts,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_clock_seconds,
        }
    }

    /// Refuses to commit if an artifact is missing.
    pub fn commit(&self, dir: &Path) -> io::Result<PathBuf> {
        if let Some(missing) = self.artifacts.all().find(|p| !dir.join(p).is_file()) {
            return Err(io::Error::new(
                io::ErrorKind::NotFound,
                format!("artifact {} is missing", missing.display()),
            ));
        }
        let path = dir.join(MANIFEST_NAME);
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_atomic(&path, json.as_bytes())?;
        Ok(path)
    }

    pub fn load(dir: &Path) -> io::Result<Self> {
        let text = std::fs::read_to_string(dir.join(MANIFEST_NAME))?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsrg_core::spectral::{make_grid, taylor_green};
    use nsrg_core::ViscosityParams;

    #[test]
    fn energy_rows_have_seventeen_digits() {
        let g = make_grid(2, 8, 1.5).unwrap();
        let mut l = EnergyLedger::default();
        let visc = ViscosityParams::new(1.0, 0.0, 1, 2).unwrap();
        l.record(0.0, &taylor_green(&g, 1.0), None, &visc);
        let csv = energy_csv(&l);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(ENERGY_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 6);
        assert_eq!(row[0], "0.0000000000000000e0");
        let v: f64 = row[1].parse().unwrap();
        assert_eq!(v, l.l2_sq[0]);
    }

    #[test]
    fn manifest_refuses_missing_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = crate::config::RunConfig::from_json(
            r#"{"dim": 2, "modes_per_axis": 8, "nu": 1, "dt": 0.1, "horizon": 1}"#,
        )
        .unwrap();
        let mut a = Artifacts::default();
        a.energy_csv.push("energy.csv".into());
        let m = RunManifest::new("run", &cfg, a, 0.0);
        assert!(m.commit(dir.path()).is_err());
        assert!(!dir.path().join(MANIFEST_NAME).exists());
        std::fs::write(dir.path().join("energy.csv"), "x").unwrap();
        m.commit(dir.path()).unwrap();
        assert_eq!(RunManifest::load(dir.path()).unwrap(), m);
    }
}
