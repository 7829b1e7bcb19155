//! The energy inequality, the weighted a priori bound, Gronwall bounds and
//! Ladyzhenskaya-class norms, evaluated on recorded runs.

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::spectral::SpectralField;

use super::EnergyLedger;

/// Quadrature budget `4 h^2 max D(u)` with `h` the largest ledger spacing.
pub fn quadrature_tolerance(ledger: &EnergyLedger) -> f64 {
    let h = ledger.max_step();
    4.0 * h * h * ledger.dirichlet.iter().copied().fold(0.0, f64::max)
}

fn check_ledger(traj: &Trajectory) -> Result<&EnergyLedger> {
    let l = &traj.ledger;
    let n = l.times.len();
    let columns = [
        l.l2_sq.len(),
        l.dirichlet.len(),
        l.visc_dissip.len(),
        l.work.len(),
        l.visc_dissip_cum.len(),
        l.work_cum.len(),
        l.grad_sq.len(),
        l.forcing_sq.len(),
    ];
    if n == 0 || columns.iter().any(|&c| c != n) {
        return Err(Error::InvalidParams("incomplete energy ledger".into()));
    }
    let (Some(&t0), Some(&t1)) = (traj.times.first(), traj.times.last()) else {
        return Err(Error::InvalidParams("trajectory has no snapshots".into()));
    };
    let matches = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    if !matches(l.times[0], t0) || !matches(l.times[n - 1], t1) || n < traj.times.len() {
        return Err(Error::InvalidParams(format!(
            "ledger ({n} entries on [{}, {}]) does not cover the trajectory ({} snapshots on [{t0}, {t1}])",
            l.times[0],
            l.times[n - 1],
            traj.times.len()
        )));
    }
    Ok(l)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub times: Vec<f64>,
    /// `|u|^2 + 2 int (Vu,u) - |u0|^2 - 2 Re int (f,u)` at every ledger entry.
    pub residual: Vec<f64>,
    pub tol_q: f64,
    pub pass: bool,
}

impl EnergyReport {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |a, r| a.max(r.abs()))
    }
}

/// Energy inequality `|u(t)|^2 + 2 int_0^t (Vu,u) <= |u0|^2 + 2 Re int_0^t (f,u)`.
pub fn check_energy_estimate(traj: &Trajectory) -> Result<EnergyReport> {
    let l = check_ledger(traj)?;
    let residual: Vec<f64> = (0..l.len())
        .map(|i| l.l2_sq[i] + l.visc_dissip_cum[i] - l.l2_sq[0] - l.work_cum[i])
        .collect();
    let tol_q = quadrature_tolerance(l);
    let pass = residual.iter().all(|&r| r <= tol_q);
    Ok(EnergyReport {
        times: l.times.clone(),
        residual,
        tol_q,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AprioriReport {
    pub times: Vec<f64>,
    /// `|u(t)|^2 + 2 nu int_0^t e^{(t-s)/c} |grad u(s)|^2 ds`.
    pub lhs: Vec<f64>,
    /// `e^{t/c} |u0|^2 + c int_0^t e^{(t-s)/c} |f(s)|^2 ds`.
    pub rhs: Vec<f64>,
    pub tol_q: f64,
    /// `min (rhs + tol_q - lhs)`.
    pub margin: f64,
    pub pass: bool,
}

/// `int_0^{t_n} e^{(t_n - s)/c} g(s) ds` for every node, trapezoid rule.
fn weighted_integrals(times: &[f64], g: &[f64], c: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    out.push(acc);
    for n in 1..times.len() {
        let h = times[n] - times[n - 1];
        let w = (h / c).exp();
        acc = w * acc + 0.5 * h * (w * g[n - 1] + g[n]);
        out.push(acc);
    }
    out
}

/// Weighted bound uniform in `eps`, checked at every ledger entry with the
/// budget [`quadrature_tolerance`].
pub fn check_apriori_bound(traj: &Trajectory, c: f64) -> Result<AprioriReport> {
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("c must be > 0, got {c}")));
    }
    let l = check_ledger(traj)?;
    let nu = traj.config.visc.nu;
    let t0 = l.times[0];
    let grad = weighted_integrals(&l.times, &l.grad_sq, c);
    let force = weighted_integrals(&l.times, &l.forcing_sq, c);
    let lhs: Vec<f64> = (0..l.len()).map(|i| l.l2_sq[i] + 2.0 * nu * grad[i]).collect();
    let rhs: Vec<f64> = (0..l.len())
        .map(|i| ((l.times[i] - t0) / c).exp() * l.l2_sq[0] + c * force[i])
        .collect();
    let tol_q = quadrature_tolerance(l);
    let margin = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| b + tol_q - a)
        .fold(f64::INFINITY, f64::min);
    Ok(AprioriReport {
        times: l.times.clone(),
        lhs,
        rhs,
        tol_q,
        margin,
        pass: margin >= 0.0,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GronwallBound {
    /// `b(t) + int_0^t b(s) a(s) exp(int_s^t a) ds`.
    pub integral: Vec<f64>,
    /// `b(t) exp(int_0^t a)`, present when `b` is nondecreasing.
    pub product: Option<Vec<f64>>,
}

/// Both conclusions of Gronwall's lemma for `y <= b + int a y`.
///
/// `A = int a` is accumulated by the trapezoid rule; on each interval
/// `a e^{-A} = -(e^{-A})'` is integrated exactly against the interval mean
/// of `b`. The discrete integral form is therefore exact for constant `a`,
/// `b` and never exceeds the product form when `b` is nondecreasing.
pub fn gronwall_bound(a: &[f64], b: &[f64], times: &[f64]) -> Result<GronwallBound> {
    let n = times.len();
    if n == 0 || a.len() != n || b.len() != n {
        return Err(Error::InvalidParams(format!(
            "gronwall_bound needs equal, non-empty samples (times {n}, a {}, b {})",
            a.len(),
            b.len()
        )));
    }
    if let Some(x) = a.iter().find(|&&x| !(x >= 0.0)) {
        return Err(Error::InvalidParams(format!("a must be >= 0, got {x}")));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("times must be strictly increasing".into()));
    }
    let mut big_a = vec![0.0; n];
    for i in 1..n {
        big_a[i] = big_a[i - 1] + 0.5 * (times[i] - times[i - 1]) * (a[i - 1] + a[i]);
    }
    // j = int_0^t b a exp(A(t) - A(s)) ds, advanced interval by interval.
    let mut integral = Vec::with_capacity(n);
    let mut j = 0.0;
    integral.push(b[0]);
    for i in 1..n {
        let da = big_a[i] - big_a[i - 1];
        j = j * da.exp() + 0.5 * (b[i - 1] + b[i]) * da.exp_m1();
        integral.push(b[i] + j);
    }
    let nondecreasing = b.windows(2).all(|w| w[1] >= w[0]);
    let product = nondecreasing.then(|| {
        b.iter()
            .zip(&big_a)
            .map(|(bi, ai)| bi * ai.exp())
            .collect()
    });
    Ok(GronwallBound { integral, product })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadyzhenskayaReport {
    /// `(int |u(t)|_{L^q}^r dt)^{1/r}`, max over snapshots for `r = inf`.
    pub norm: f64,
    /// `2/r + n/q <= 1` with `q > n`.
    pub in_class: bool,
}

/// Whether `L^r(I, L^q)` is a uniqueness class in dimension `dim`.
pub fn in_ladyzhenskaya_class(r: f64, q: f64, dim: usize) -> bool {
    let n = dim as f64;
    q > n && 2.0 / r + n / q <= 1.0
}

/// Spatial `L^q` norm of the velocity magnitude, by quadrature on the padded grid.
fn lq_norm(u: &crate::spectral::VectorField, q: f64) -> f64 {
    let grid = u.grid();
    let phys = u.padded_physical();
    let cell = grid.volume() / grid.padded_len() as f64;
    let mag = (0..grid.padded_len()).map(|i| phys.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt());
    if q.is_infinite() {
        mag.fold(0.0, f64::max)
    } else {
        (mag.map(|m| m.powf(q)).sum::<f64>() * cell).powf(1.0 / q)
    }
}

/// `L^r(I, L^q)` norm of a trajectory over its snapshots (trapezoid in time).
pub fn ladyzhenskaya_norm(traj: &Trajectory, r: f64, q: f64) -> Result<LadyzhenskayaReport> {
    if !(q >= 2.0) {
        return Err(Error::InvalidParams(format!("q must be >= 2, got {q}")));
    }
    if !(r >= 1.0) {
        return Err(Error::InvalidParams(format!("r must be >= 1, got {r}")));
    }
    if traj.snapshots.is_empty() {
        return Err(Error::InvalidParams("trajectory has no snapshots".into()));
    }
    let norms: Vec<f64> = traj.snapshots.iter().map(|u| lq_norm(u, q)).collect();
    let norm = if r.is_infinite() {
        norms.iter().copied().fold(0.0, f64::max)
    } else {
        let integral: f64 = traj
            .times
            .windows(2)
            .zip(norms.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(r) + v[1].powf(r)))
            .sum();
        integral.powf(1.0 / r)
    };
    Ok(LadyzhenskayaReport {
        norm,
        in_class: in_ladyzhenskaya_class(r, q, traj.config.grid.dim()),
    })
}
