use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nsrg_cli::output::{RunManifest, ENERGY_HEADER, MANIFEST_NAME};
use nsrg_cli::snapshot::Snapshot;
use nsrg_cli::verify::{verify, Operators, Suite};
use nsrg_core::hodge::leray_project;
use nsrg_core::spectral::{l2_norm, make_grid, taylor_green};
use nsrg_core::{SpectralField, VectorField};

fn nsrg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsrg"))
        .args(args)
        .env_remove("NSRG_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: &str = r#"{"dim": 2, "modes_per_axis": 16, "nu": 0.2, "epsilon": 0.01, "dt": 0.01, "horizon": 0.2,
  "snapshot_stride": 5, "seed": 4,
  "forcing": {"kind": "steady", "field": {"kind": "random", "amplitude": 1.0, "cutoff": 3.0}},
  "initial": {"kind": "random", "amplitude": 1.0, "cutoff": 5.0}}"#;

#[test]
fn run_writes_manifest_last_with_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let out = tmp.path().join("out");
    let o = nsrg(&["run", s(&cfg), "--output-dir", s(&out), "--pressure"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let m = RunManifest::load(&out).unwrap();
    assert_eq!(m.command, "run");
    assert_eq!(m.artifacts.snapshots.len(), 5);
    assert_eq!(m.artifacts.pressure.len(), 5);
    for p in m.artifacts.all() {
        assert!(out.join(p).is_file(), "{}", p.display());
    }
    let manifest_time = std::fs::metadata(out.join(MANIFEST_NAME)).unwrap().modified().unwrap();
    for p in m.artifacts.all() {
        assert!(std::fs::metadata(out.join(p)).unwrap().modified().unwrap() <= manifest_time);
    }
    let csv = std::fs::read_to_string(out.join("energy.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(ENERGY_HEADER));
    assert_eq!(csv.lines().count(), 1 + 21);
    let p = Snapshot::read(&out.join("pressure/p_00004.bin")).unwrap();
    assert_eq!(p.components.len(), 1);
    assert!((p.t - 0.2).abs() < 1e-15);
}

#[test]
fn identical_config_and_seed_give_identical_csv_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(nsrg(&["run", s(&cfg), "--output-dir", s(&a)]).status.success());
    assert!(nsrg(&["run", s(&cfg), "--output-dir", s(&b)]).status.success());
    for f in ["energy.csv", "snapshots/u_00004.bin", "report.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn shipped_taylor_green_decays_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nsrg(&["run", s(&shipped("taylor_green.json")), "--output-dir", s(tmp.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let last = Snapshot::read(&tmp.path().join("snapshots/u_00010.bin")).unwrap();
    let g = make_grid(2, 32, 1.5).unwrap();
    let u = last.to_vector_field(&g).unwrap();
    let tg = taylor_green(&g, 1.0);
    let factor = (-2.0f64 * 0.1 * 1.0).exp();
    assert_eq!(last.t, 1.0);
    assert!(l2_norm(&(&u - &tg.scaled(factor))) / l2_norm(&tg) < 1e-10);
}

#[test]
fn config_errors_exit_two_with_a_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"dim": 3, "modes_per_axis": 8, "nu": 0.1, "epsilon": 0.1, "m": 1, "dt": 0.01, "horizon": 0.1}"#,
            "`m`",
        ),
        (
            r#"{"dim": 2, "modes_per_axis": 8, "nu": 0.1, "dt": 2.0, "horizon": 1.0}"#,
            "`dt`",
        ),
        ("{\"dim\": 2,\n \"modes_per_axis\": 8,\n \"nu\": oops}", "line 3"),
    ];
    for (i, (json, needle)) in cases.iter().enumerate() {
        let cfg = write_config(tmp.path(), &format!("c{i}.json"), json);
        let out = tmp.path().join(format!("out{i}"));
        let o = nsrg(&["run", s(&cfg), "--output-dir", s(&out)]);
        assert_eq!(o.status.code(), Some(2));
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{err}");
        assert!(!out.exists());
    }
    let o = nsrg(&["run", s(&tmp.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

const BLOW: &str = r#"{"dim": 2, "modes_per_axis": 16, "nu": 0.001, "dt": 0.2, "horizon": 5.0,
  "scheme": "IF_EULER", "initial": {"kind": "random", "amplitude": 200.0, "cutoff": 5.0}}"#;

#[test]
fn blow_up_exits_three_with_last_good_time() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "blow.json", BLOW);
    let out = tmp.path().join("out");
    let o = nsrg(&["run", s(&cfg), "--output-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("last good t"), "{err}");
    assert!(!out.join(MANIFEST_NAME).exists());

    let o = nsrg(&[
        "sweep",
        s(&cfg),
        "--epsilons",
        "0.1,0.01,0.001,0.0001",
        "--output-dir",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon = "));
}

#[test]
fn sweep_dry_run_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let out = tmp.path().join("sweep");
    let o = nsrg(&["sweep", s(&cfg), "--dry-run", "--output-dir", s(&out)]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.matches("epsilon").count(), 5);
    assert!(text.contains("eps_04_1e-3"), "{text}");
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 1);

    let o = nsrg(&["sweep", s(&cfg), "--dry-run", "--epsilons", "0.1,0.01,0.01,0.001"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("non-descending"));
}

#[test]
fn sweep_writes_per_epsilon_directories_and_gate() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let out = tmp.path().join("sweep");
    let o = nsrg(&["sweep", s(&cfg), "--output-dir", s(&out), "--jobs", "2"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("PASS") || stdout.contains("FAIL"), "{stdout}");
    let summary = std::fs::read_to_string(out.join("sweep_summary.csv")).unwrap();
    let pass = summary.contains("rate_gate_status,PASS");
    assert_eq!(o.status.success(), pass);
    let pairs = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 5);
    let m = RunManifest::load(&out).unwrap();
    assert_eq!(m.command, "sweep");
    for p in m.artifacts.all() {
        assert!(out.join(p).is_file(), "{}", p.display());
    }
    assert!(out.join("eps_00_1e-1/energy.csv").is_file());
    assert!(out.join("eps_04_1e-3/snapshots/u_00004.bin").is_file());
}

#[test]
fn output_root_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let root = tmp.path().join("root");
    let o = Command::new(env!("CARGO_BIN_EXE_nsrg"))
        .args(["run", s(&cfg)])
        .env("NSRG_OUTPUT_DIR", &root)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(root.join("small").join(MANIFEST_NAME).is_file());
}

#[test]
fn verify_report_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a.json"), tmp.path().join("b.json"));
    let oa = nsrg(&["verify", "--suite", "all", "--seed", "11", "--report", s(&a)]);
    let ob = nsrg(&["verify", "--suite", "all", "--seed", "11", "--report", s(&b)]);
    assert!(oa.status.success(), "{}", String::from_utf8_lossy(&oa.stdout));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(oa.stdout, ob.stdout);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["seed"], 11);
}

fn transposed_sign_leray(u: &VectorField) -> VectorField {
    // Adds the gradient part back instead of removing it.
    let p = leray_project(u);
    &u.scaled(2.0) - &p
}

#[test]
fn mutated_projection_fails_the_projector_suite() {
    let ops = Operators {
        leray: transposed_sign_leray,
    };
    let r = verify(Suite::All, 0, &ops).unwrap();
    assert!(!r.pass);
    assert!(r.first_failure.unwrap().starts_with("projector:"));
    assert!(verify(Suite::Projector, 0, &Operators::default()).unwrap().pass);
}
