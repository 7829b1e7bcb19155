//! Desk-scale invariant suites behind `nsrg verify`.
//!
//! Every suite is deterministic in the seed. The projection operator is
//! injected through [`Operators`] so the suites can be pointed at a
//! deliberately broken implementation.

use nsrg_core::diagnostics::{
    check_apriori_bound, check_energy_estimate, gronwall_bound, ladyzhenskaya_norm,
    toy_deviation, toy_distance,
};
use nsrg_core::evolution::{
    initial_value_potential, run_galerkin_oracle, run_simulation, solve_picard, ForcingSpec,
    SolverConfig,
};
use nsrg_core::hodge::leray_project;
use nsrg_core::nonlinear::{convect, nonlinear_term};
use nsrg_core::spectral::{
    divergence_defect, gradient, gradient_sq, inner, l2_norm, make_grid, random_scalar_field,
    random_solenoidal, random_vector_field, taylor_green,
};
use nsrg_core::{Grid, SpectralField, VectorField, ViscosityParams};
use serde::Serialize;
use std::sync::Arc;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Projector,
    Nonlinear,
    Evolution,
    Estimates,
    All,
}

impl Suite {
    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Projector,
                Suite::Nonlinear,
                Suite::Evolution,
                Suite::Estimates,
            ],
            s => vec![s],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Projector => "projector",
            Suite::Nonlinear => "nonlinear",
            Suite::Evolution => "evolution",
            Suite::Estimates => "estimates",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy)]
pub struct Operators {
    pub leray: fn(&VectorField) -> VectorField,
}

impl Default for Operators {
    fn default() -> Self {
        Self {
            leray: leray_project,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub first_failure: Option<String>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    /// `value <= tolerance`; NaN fails.
    fn le(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        });
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool) {
        self.le(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

fn grids() -> Vec<(&'static str, Arc<Grid>)> {
    vec![
        ("2d", make_grid(2, 32, 1.5).unwrap()),
        ("3d", make_grid(3, 8, 1.5).unwrap()),
    ]
}

fn cutoff(g: &Grid) -> f64 {
    (g.modes_per_axis() / 3) as f64
}

fn projector(r: &mut Recorder, seed: u64, ops: &Operators) -> Result<(), CliError> {
    let p = ops.leray;
    for (tag, g) in grids() {
        let (mut idem, mut adj, mut div, mut grad, mut orth, mut sum) = (0f64, 0f64, 0f64, 0f64, 0f64, 0f64);
        for s in 0..10 {
            let s = seed.wrapping_mul(1000).wrapping_add(3 * s);
            let u = random_vector_field(&g, s, 0.5, cutoff(&g))?;
            let v = random_vector_field(&g, s + 1, 0.5, cutoff(&g))?;
            let q = random_scalar_field(&g, s + 2, 0.5, cutoff(&g))?;
            let pu = p(&u);
            let nu = l2_norm(&u);
            idem = idem.max(l2_norm(&(&p(&pu) - &pu)) / nu);
            adj = adj.max((inner(&pu, &v)? - inner(&u, &p(&v))?).abs() / (nu * l2_norm(&v)));
            div = div.max(divergence_defect(&pu) * l2_norm(&pu) / nu);
            let gq = gradient(&q);
            grad = grad.max(l2_norm(&p(&gq)) / l2_norm(&gq));
            let gradient_part = &u - &pu;
            orth = orth.max(inner(&pu, &gradient_part)?.abs() / (nu * nu));
            let split = nsrg_core::hodge::hodge_split(&u);
            sum = sum.max(
                l2_norm(&(&(&split.harmonic + &split.solenoidal) - &pu))
                    .max(l2_norm(&(&split.gradient_part - &gradient_part)))
                    / nu,
            );
        }
        r.le(format!("{tag}: P^2 = P"), idem, 1e-12);
        r.le(format!("{tag}: P* = P"), adj, 1e-12);
        r.le(format!("{tag}: div P = 0"), div, 1e-12);
        r.le(format!("{tag}: P grad = 0"), grad, 1e-12);
        r.le(format!("{tag}: Pu orthogonal to (Id - P)u"), orth, 1e-12);
        r.le(format!("{tag}: Hodge parts sum to P and Id - P"), sum, 1e-12);
    }
    Ok(())
}

fn nonlinear(r: &mut Recorder, seed: u64, ops: &Operators) -> Result<(), CliError> {
    for (tag, g) in grids() {
        let (mut anti, mut energy) = (0f64, 0f64);
        for s in 0..10 {
            let s = seed.wrapping_mul(1000).wrapping_add(3 * s);
            let u = random_solenoidal(&g, s, 1.0, cutoff(&g))?;
            let v = random_vector_field(&g, s + 1, 0.5, cutoff(&g))?;
            let w = random_vector_field(&g, s + 2, 0.5, cutoff(&g))?;
            let a = inner(&convect(&u, &v)?, &w)? + inner(&convect(&u, &w)?, &v)?;
            let scale = l2_norm(&u)
                * (gradient_sq(&v).sqrt() * l2_norm(&w) + gradient_sq(&w).sqrt() * l2_norm(&v));
            anti = anti.max(a.abs() / scale);
            let e = inner(&nonlinear_term(&u)?, &u)?;
            energy = energy.max(e.abs() / (l2_norm(&u).powi(2) * gradient_sq(&u).sqrt()));
        }
        r.le(format!("{tag}: (N(u,v),w) + (N(u,w),v) = 0"), anti, 1e-11);
        r.le(format!("{tag}: (N(u),u) = 0"), energy, 1e-11);
    }
    let g = make_grid(2, 32, 1.5)?;
    let tg = taylor_green(&g, 1.0);
    let n = nonlinear_term(&tg)?;
    let expect = VectorField::from_fn(&g, |x| {
        [-0.5 * (2.0 * x[0]).sin(), -0.5 * (2.0 * x[1]).sin(), 0.0]
    })?;
    r.le("Taylor-Green: N(u) = -(sin 2x, sin 2y)/2", l2_norm(&(&n - &expect)), 1e-12);
    r.le("Taylor-Green: P N(u) = 0", l2_norm(&(ops.leray)(&n)), 1e-12);
    Ok(())
}

fn evolution(r: &mut Recorder, seed: u64) -> Result<(), CliError> {
    let g = make_grid(2, 16, 1.5)?;
    let visc = ViscosityParams::new(0.5, 0.1, 1, 2)?;
    let tg = taylor_green(&g, 1.0);
    let traj = run_simulation(&tg, &SolverConfig::new(&g, visc, 1e-2, 0.5))?;
    let exact = tg.scaled((-(2.0 * 0.5 + 0.1 * 2.0) * 0.5f64).exp());
    r.le("Taylor-Green decay", l2_norm(&(traj.final_state() - &exact)), 1e-12);

    let u0 = random_solenoidal(&g, seed, 1.0, 5.0)?;
    let again = initial_value_potential(&initial_value_potential(&u0, 0.2, &visc)?, 0.3, &visc)?;
    let once = initial_value_potential(&u0, 0.5, &visc)?;
    r.le("semigroup law", l2_norm(&(&again - &once)), 1e-13);

    let mut cfg = SolverConfig::new(&g, visc, 1e-2, 0.5);
    cfg.forcing = ForcingSpec::TimeHarmonic {
        field: random_solenoidal(&g, seed.wrapping_add(1), 1.0, 4.0)?,
        omega: 2.0,
    };
    let traj = run_simulation(&u0.scaled(3.0), &cfg)?;
    let div = traj.snapshots.iter().map(divergence_defect).fold(0.0, f64::max);
    r.le("forced run stays solenoidal", div, 1e-11);

    let g = make_grid(2, 8, 1.5)?;
    let visc = ViscosityParams::new(0.2, 0.02, 1, 2)?;
    let u0 = random_solenoidal(&g, seed.wrapping_add(2), 1.0, 2.0)?;
    let mut cfg = SolverConfig::new(&g, visc, 5e-3, 0.25);
    cfg.snapshot_stride = 5;
    let a = run_simulation(&u0, &cfg)?;
    let b = run_galerkin_oracle(&u0, &cfg)?;
    let c = solve_picard(&u0, &cfg, 1e-12, 200)?;
    let sup = |x: &nsrg_core::evolution::Trajectory, y: &nsrg_core::evolution::Trajectory| {
        x.snapshots
            .iter()
            .zip(&y.snapshots)
            .map(|(p, q)| l2_norm(&(p - q)))
            .fold(0.0, f64::max)
    };
    r.holds("oracle snapshot times agree", a.times.len() == b.times.len() && a.times.len() == c.times.len());
    r.le("stepper vs Galerkin oracle", sup(&a, &b), 1e-7);
    r.le("stepper vs Picard", sup(&a, &c), 1e-7);
    r.le("Galerkin oracle vs Picard", sup(&b, &c), 1e-7);
    Ok(())
}

fn estimates(r: &mut Recorder, seed: u64) -> Result<(), CliError> {
    let g = make_grid(2, 16, 1.5)?;
    let visc = ViscosityParams::new(0.1, 0.01, 1, 2)?;
    let mut cfg = SolverConfig::new(&g, visc, 1e-2, 1.0);
    cfg.forcing = ForcingSpec::TimeHarmonic {
        field: random_solenoidal(&g, seed, 1.0, 4.0)?,
        omega: 1.0,
    };
    let u0 = random_solenoidal(&g, seed.wrapping_add(1), 1.0, 5.0)?;
    let traj = run_simulation(&u0, &cfg)?;
    let e = check_energy_estimate(&traj)?;
    r.le("energy residual <= tol_q", e.max_residual() - e.tol_q, 0.0);
    let a = check_apriori_bound(&traj, 1.0)?;
    r.le("a priori bound (c = 1)", -a.margin, 0.0);

    let lz = ladyzhenskaya_norm(&traj, f64::INFINITY, 2.0)?;
    let max_l2 = traj.ledger.l2_sq.iter().copied().fold(0.0, f64::max).sqrt();
    r.le("L^inf(L^2) norm = max ledger L2", (lz.norm - max_l2).abs(), 1e-12);
    let tg = taylor_green(&g, 1.0);
    let steady = SolverConfig::new(&g, visc, 0.5, 1.0);
    let still = nsrg_core::evolution::Trajectory {
        times: vec![0.0, 1.0],
        snapshots: vec![tg.clone(), tg],
        ledger: Default::default(),
        config: steady,
        stats: Default::default(),
    };
    let l4 = ladyzhenskaya_norm(&still, 4.0, 4.0)?;
    let exact = (5.0 * std::f64::consts::PI.powi(2) / 4.0).powf(0.25);
    r.le("Taylor-Green L^4(L^4) norm", (l4.norm - exact).abs(), 1e-12);
    r.holds("(r, q) = (4, 4) in the uniqueness class for n = 2", l4.in_class);

    let times: Vec<f64> = (0..=50).map(|i| i as f64 * 0.02).collect();
    let gb = gronwall_bound(&vec![0.5; times.len()], &vec![2.0; times.len()], &times)?;
    let prod = gb.product.unwrap_or_default();
    let err = times
        .iter()
        .zip(&prod)
        .map(|(t, p)| (p - 2.0 * (0.5 * t).exp()).abs())
        .fold(0.0, f64::max);
    r.le("Gronwall product form = b0 exp(alpha t)", err, 1e-13);
    let order = gb.integral.iter().zip(&prod).map(|(i, p)| i - p).fold(f64::NEG_INFINITY, f64::max);
    r.le("Gronwall integral form <= product form", order, 1e-13);

    let d = toy_deviation(2.0, 0.01, 0.1)?;
    r.le("toy boundary layer: |u(0.1) - 1| = e^-10", (d - (-10f64).exp()).abs(), 1e-15);
    let uniform = toy_distance(2.0, 1e-3, &times, 0.0)?;
    r.le("toy boundary layer: uniform distance = |u0 - 1|", (uniform - 1.0).abs(), 0.0);
    Ok(())
}

/// Run the requested suites; checks are listed in execution order.
pub fn verify(suite: Suite, seed: u64, ops: &Operators) -> Result<VerifyReport, CliError> {
    let mut checks = Vec::new();
    for s in suite.expand() {
        let mut r = Recorder {
            suite: s.name(),
            checks: Vec::new(),
        };
        match s {
            Suite::Projector => projector(&mut r, seed, ops)?,
            Suite::Nonlinear => nonlinear(&mut r, seed, ops)?,
            Suite::Evolution => evolution(&mut r, seed)?,
            Suite::Estimates => estimates(&mut r, seed)?,
            Suite::All => unreachable!("expanded above"),
        }
        checks.extend(r.checks);
    }
    let first_failure = checks
        .iter()
        .find(|c| !c.pass)
        .map(|c| format!("{}: {}", c.suite, c.name));
    Ok(VerifyReport {
        seed,
        pass: first_failure.is_none(),
        checks,
        first_failure,
    })
}
