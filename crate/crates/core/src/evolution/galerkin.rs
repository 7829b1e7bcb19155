//! Dense Faedo-Galerkin oracle.
//!
//! The basis is the set of eigenfunctions of `V + Id` on the torus:
//! `e = p exp(i k . x)` with `p` a unit polarization orthogonal to `k`
//! (`dim - 1` of them per `k != 0`, `dim` axis vectors at `k = 0`), eigenvalue
//! `1 + nu |k|^2 + eps |k|^{2m}`. Expanding `u = sum c_i e_i` turns the
//! projected equation into
//!
//! ```text
//! c_i' + (lambda_i - 1) c_i + sum_{l,m} a_{i,l,m} c_l c_m = (f, e_i) / (e_i, e_i)
//! ```
//!
//! with `a_{i,l,m} = (N(e_l, e_m), e_i) / (e_i, e_i)` assembled through
//! [`crate::nonlinear::convect`].

use std::sync::Arc;

use super::ode::dopri5;
use super::{check_initial, Recorder, SolveStats, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::nonlinear::convect;
use crate::spectral::{Grid, SpectralField, VectorField, ViscosityParams, C64};

/// Largest `modes_per_axis` accepted by the dense oracle.
pub const GALERKIN_MAX_MODES: usize = 16;
/// Relative and absolute tolerance of the adaptive integrator.
pub const GALERKIN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisMode {
    pub k: [i64; 3],
    /// Flat coefficient index of `k` on the grid.
    pub index: usize,
    pub polarization: [f64; 3],
    /// Position of this polarization among those sharing `k`.
    pub slot: usize,
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn polarizations(k: [i64; 3], dim: usize) -> Vec<[f64; 3]> {
    let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
    if k == [0, 0, 0] {
        return (0..dim)
            .map(|j| {
                let mut e = [0.0; 3];
                e[j] = 1.0;
                e
            })
            .collect();
    }
    if dim == 2 {
        return vec![normalize([-kf[1], kf[0], 0.0])];
    }
    // Cross with the axis least aligned with k.
    let axis = (0..3)
        .min_by(|&a, &b| kf[a].abs().total_cmp(&kf[b].abs()))
        .unwrap();
    let mut a = [0.0; 3];
    a[axis] = 1.0;
    let p1 = normalize(cross(kf, a));
    let p2 = normalize(cross(kf, p1));
    vec![p1, p2]
}

/// Coefficients of a field in the eigenbasis of `V + Id`.
#[derive(Clone, Debug)]
pub struct GalerkinState {
    pub basis: Vec<BasisMode>,
    pub coeffs: Vec<C64>,
    pub eigenvalues: Vec<f64>,
}

impl GalerkinState {
    pub fn new(grid: &Arc<Grid>, visc: &ViscosityParams) -> Result<Self> {
        if grid.modes_per_axis() > GALERKIN_MAX_MODES {
            return Err(Error::BasisTooLarge {
                modes: grid.modes_per_axis(),
                limit: GALERKIN_MAX_MODES,
            });
        }
        let mut basis = Vec::new();
        for index in 0..grid.len() {
            if !grid.is_retained(index) {
                continue;
            }
            let k = grid.wavevector(index);
            for (slot, polarization) in polarizations(k, grid.dim()).into_iter().enumerate() {
                basis.push(BasisMode {
                    k,
                    index,
                    polarization,
                    slot,
                });
            }
        }
        let eigenvalues = basis
            .iter()
            .map(|b| 1.0 + visc.symbol(grid.k2(b.index)))
            .collect();
        Ok(Self {
            coeffs: vec![C64::new(0.0, 0.0); basis.len()],
            basis,
            eigenvalues,
        })
    }

    /// Coefficient of each basis function in `u` (exact for solenoidal `u`).
    pub fn project(&mut self, u: &VectorField) {
        for (c, b) in self.coeffs.iter_mut().zip(&self.basis) {
            *c = (0..u.grid().dim())
                .map(|j| u.component(j)[b.index] * b.polarization[j])
                .sum();
        }
    }

    pub fn reconstruct(&self, grid: &Arc<Grid>) -> VectorField {
        let mut u = VectorField::zeros(grid);
        for (c, b) in self.coeffs.iter().zip(&self.basis) {
            for j in 0..grid.dim() {
                u.component_mut(j)[b.index] += c * b.polarization[j];
            }
        }
        u
    }

    fn unit_field(&self, grid: &Arc<Grid>, i: usize) -> VectorField {
        let b = &self.basis[i];
        let mut u = VectorField::zeros(grid);
        for j in 0..grid.dim() {
            u.component_mut(j)[b.index] = C64::new(b.polarization[j], 0.0);
        }
        u
    }
}

/// Nonzero entries `a_{i,l,m}` of the quadratic tensor.
#[derive(Clone, Debug, Default)]
pub struct QuadraticTensor {
    pub entries: Vec<(u32, u32, u32, C64)>,
}

impl QuadraticTensor {
    /// `out_i = sum_{l,m} a_{i,l,m} c_l c_m`.
    pub fn contract(&self, c: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for &(i, l, m, a) in &self.entries {
            out[i as usize] += a * c[l as usize] * c[m as usize];
        }
    }
}

/// Assemble `a_{i,l,m}` by convecting each basis function against the sum of
/// all basis functions of one polarization slot: within a slot the
/// wavevectors are distinct, so every `(l, m)` pair lands on its own output
/// mode `k_l + k_m`.
pub fn assemble_tensor(state: &GalerkinState, grid: &Arc<Grid>) -> Result<QuadraticTensor> {
    let slots = state.basis.iter().map(|b| b.slot).max().map_or(0, |s| s + 1);
    let mut by_index: Vec<Vec<usize>> = vec![Vec::new(); grid.len()];
    for (i, b) in state.basis.iter().enumerate() {
        by_index[b.index].push(i);
    }
    let slot_fields: Vec<(Vec<usize>, VectorField)> = (0..slots)
        .map(|s| {
            let members: Vec<usize> = (0..state.basis.len())
                .filter(|&i| state.basis[i].slot == s)
                .collect();
            let mut field = VectorField::zeros(grid);
            for &m in &members {
                field = &field + &state.unit_field(grid, m);
            }
            (members, field)
        })
        .collect();

    let mut entries = Vec::new();
    for l in 0..state.basis.len() {
        let el = state.unit_field(grid, l);
        let kl = state.basis[l].k;
        for (members, field) in &slot_fields {
            let n = convect(&el, field)?;
            for &m in members {
                let km = state.basis[m].k;
                let target = [kl[0] + km[0], kl[1] + km[1], kl[2] + km[2]];
                let Some(idx) = grid.index_of(target) else {
                    continue;
                };
                for &i in &by_index[idx] {
                    let p = state.basis[i].polarization;
                    let a: C64 = (0..grid.dim()).map(|j| n.component(j)[idx] * p[j]).sum();
                    if a.norm() > 1e-14 {
                        entries.push((i as u32, l as u32, m as u32, a));
                    }
                }
            }
        }
    }
    Ok(QuadraticTensor { entries })
}

/// Integrate the coefficient ODE system with adaptive Dormand-Prince at
/// tolerance [`GALERKIN_TOL`]; snapshots and ledger at every
/// `snapshot_stride * dt` and at the horizon.
pub fn run_galerkin_oracle(u0: &VectorField, cfg: &SolverConfig) -> Result<Trajectory> {
    let grid = cfg.grid.clone();
    if grid.modes_per_axis() > GALERKIN_MAX_MODES {
        return Err(Error::BasisTooLarge {
            modes: grid.modes_per_axis(),
            limit: GALERKIN_MAX_MODES,
        });
    }
    let u = check_initial(u0, cfg)?;
    let mut state = GalerkinState::new(&grid, &cfg.visc)?;
    state.project(&u);
    let tensor = if cfg.nonlinearity_enabled {
        assemble_tensor(&state, &grid)?
    } else {
        QuadraticTensor::default()
    };

    let rate: Vec<f64> = state.eigenvalues.iter().map(|l| l - 1.0).collect();
    let basis = state.basis.clone();
    let dim = grid.dim();
    let forcing_coeffs = |t: f64| -> Option<Vec<C64>> {
        cfg.projected_forcing(t).map(|pf| {
            basis
                .iter()
                .map(|b| (0..dim).map(|j| pf.component(j)[b.index] * b.polarization[j]).sum())
                .collect()
        })
    };
    let mut quad = vec![C64::new(0.0, 0.0); state.basis.len()];
    let mut rhs = |t: f64, c: &[C64], dc: &mut [C64]| {
        tensor.contract(c, &mut quad);
        let f = forcing_coeffs(t);
        for i in 0..c.len() {
            dc[i] = -c[i] * rate[i] - quad[i];
            if let Some(f) = &f {
                dc[i] += f[i];
            }
        }
    };

    let n_steps = cfg.n_steps();
    let mut rec = Recorder::new(cfg);
    rec.record(0, 0.0, &u, cfg.forcing.at(0.0).as_ref(), false);
    let mut h = 0.0;
    let mut stats = SolveStats::default();
    let mut node = 0;
    while node < n_steps {
        let next = (node + cfg.snapshot_stride).min(n_steps);
        let (t0, t1) = (cfg.node_time(node), cfg.node_time(next));
        let s = dopri5(&mut rhs, t0, t1, &mut state.coeffs, &mut h, GALERKIN_TOL, GALERKIN_TOL);
        stats.steps += s.accepted;
        stats.rhs_evaluations += s.evaluations;
        if state.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::BlowUp {
                time: t1,
                last_good_time: t0,
                reason: "non-finite Galerkin coefficient".into(),
            });
        }
        let field = state.reconstruct(&grid);
        // Ledger and snapshots share the output nodes here; stride 1 in
        // Recorder terms.
        rec.record(0, t1, &field, cfg.forcing.at(t1).as_ref(), next == n_steps);
        node = next;
    }
    Ok(rec.finish(cfg, stats))
}
