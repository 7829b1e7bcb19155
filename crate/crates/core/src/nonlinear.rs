//! Dealiased convection `N(u, v) = (u . grad) v`, its trilinear form and the
//! quadratic potential `Q(v, w) = (v . w) / 2`.
//!
//! Products are evaluated on the padded grid (at least 3/2 oversampling) and
//! truncated back to the band, so the retained coefficients of every
//! quadratic product are exact. That makes `(N(u, v), w) = -(N(u, w), v)` for
//! solenoidal `u` hold to rounding.
//!
//! Arithmetic is complex throughout, so the routines also accept the
//! non-Hermitian single-mode fields used to assemble Galerkin tensors.

use crate::error::{Error, Result};
use crate::hodge::{leray_project, SOLENOIDAL_TOL};
use crate::spectral::{
    dirichlet_form, divergence_defect, inner, l2_norm, random_solenoidal, random_vector_field,
    same_grid, Grid, ScalarField, SpectralField, VectorField, ViscosityParams, C64,
};
use std::sync::Arc;

fn derivative(grid: &Grid, coeffs: &[C64], axis: usize) -> Vec<C64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, z)| z * C64::new(0.0, grid.wavevector(i)[axis] as f64))
        .collect()
}

/// `sum_j u_j d_j v`, computed on the padded grid then truncated.
pub fn convect(u: &VectorField, v: &VectorField) -> Result<VectorField> {
    if !same_grid(u.grid(), v.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid().clone();
    let dim = grid.dim();
    let u_pad: Vec<Vec<C64>> = (0..dim).map(|j| grid.to_padded(u.component(j))).collect();
    let mut out = VectorField::zeros(&grid);
    for i in 0..dim {
        let mut acc = vec![C64::new(0.0, 0.0); grid.padded_len()];
        for (j, uj) in u_pad.iter().enumerate() {
            let dv = grid.to_padded(&derivative(&grid, v.component(i), j));
            for ((a, x), y) in acc.iter_mut().zip(uj).zip(&dv) {
                *a += x * y;
            }
        }
        out.component_mut(i).copy_from_slice(&grid.truncate_padded(acc));
    }
    Ok(out)
}

/// `N(u) = N(u, u)`.
pub fn nonlinear_term(u: &VectorField) -> Result<VectorField> {
    convect(u, u)
}

/// `P N(u)` for solenoidal `u`; rejects inputs with relative divergence above
/// [`SOLENOIDAL_TOL`].
pub fn projected_nonlinear_term(u: &VectorField) -> Result<VectorField> {
    let defect = divergence_defect(u);
    if defect > SOLENOIDAL_TOL {
        return Err(Error::NotSolenoidal { defect });
    }
    Ok(leray_project(&convect(u, u)?))
}

/// Pointwise half inner product of two vector fields.
pub fn quadratic_potential(v: &VectorField, w: &VectorField) -> Result<ScalarField> {
    if !same_grid(v.grid(), w.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = v.grid().clone();
    let mut acc = vec![C64::new(0.0, 0.0); grid.padded_len()];
    for c in 0..grid.dim() {
        let a = grid.to_padded(v.component(c));
        let b = grid.to_padded(w.component(c));
        for ((s, x), y) in acc.iter_mut().zip(&a).zip(&b) {
            *s += x * y * 0.5;
        }
    }
    ScalarField::from_coeffs(&grid, grid.truncate_padded(acc))
}

/// Value and structural checks of `(N(u, v), w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrilinearReport {
    pub value: f64,
    /// `|(N(u, v), w) + (N(u, w), v)|`.
    pub antisymmetry_defect: f64,
    /// `|value|` over `c ||u||^{1/2} D(u)^{1/4} ||v||^{1/2} D(v)^{1/4} D(w)^{1/2}`.
    pub bound_ratio: f64,
}

/// Product of the interpolation bound without the constant.
pub fn trilinear_bound(
    u: &VectorField,
    v: &VectorField,
    w: &VectorField,
    visc: &ViscosityParams,
) -> Result<f64> {
    let du = dirichlet_form(u, u, visc)?;
    let dv = dirichlet_form(v, v, visc)?;
    let dw = dirichlet_form(w, w, visc)?;
    Ok(l2_norm(u).sqrt() * du.powf(0.25) * l2_norm(v).sqrt() * dv.powf(0.25) * dw.sqrt())
}

pub fn trilinear_form(
    u: &VectorField,
    v: &VectorField,
    w: &VectorField,
    visc: &ViscosityParams,
    c: f64,
) -> Result<TrilinearReport> {
    if !same_grid(u.grid(), w.grid()) {
        return Err(Error::GridMismatch);
    }
    let value = inner(&convect(u, v)?, w)?;
    let swapped = inner(&convect(u, w)?, v)?;
    let bound = c * trilinear_bound(u, v, w, visc)?;
    Ok(TrilinearReport {
        value,
        antisymmetry_defect: (value + swapped).abs(),
        bound_ratio: if bound > 0.0 { value.abs() / bound } else { 0.0 },
    })
}

/// Two times the largest observed `|(N(u, v), w)| / bound` over `samples`
/// seeded triples (solenoidal `u`, general `v`, `w`).
pub fn calibrate_trilinear_constant(
    grid: &Arc<Grid>,
    visc: &ViscosityParams,
    first_seed: u64,
    samples: usize,
) -> Result<f64> {
    let cutoff = (grid.modes_per_axis() / 3) as f64;
    let mut worst: f64 = 0.0;
    for s in 0..samples as u64 {
        let seed = first_seed + 3 * s;
        let u = random_solenoidal(grid, seed, 1.0, cutoff)?;
        let v = random_vector_field(grid, seed + 1, 0.5, cutoff)?;
        let w = random_vector_field(grid, seed + 2, 0.5, cutoff)?;
        worst = worst.max(trilinear_form(&u, &v, &w, visc, 1.0)?.bound_ratio);
    }
    Ok(2.0 * worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, taylor_green, to_spectral};

    #[test]
    fn shear_and_taylor_green() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let shear = VectorField::from_fn(&g, |x| [x[1].sin(), 0.0, 0.0]).unwrap();
        assert!(l2_norm(&convect(&shear, &shear).unwrap()) < 1e-14);
        let tg = taylor_green(&g, 1.0);
        let n = nonlinear_term(&tg).unwrap();
        let expect = VectorField::from_fn(&g, |x| {
            [-0.5 * (2.0 * x[0]).sin(), -0.5 * (2.0 * x[1]).sin(), 0.0]
        })
        .unwrap();
        assert!(l2_norm(&(&n - &expect)) < 1e-14);
        assert!(l2_norm(&projected_nonlinear_term(&tg).unwrap()) < 1e-14);
        assert!(l2_norm(&projected_nonlinear_term(&shear).unwrap()) < 1e-14);
        let z = VectorField::zeros(&g);
        assert_eq!(l2_norm(&convect(&z, &tg).unwrap()), 0.0);
    }

    #[test]
    fn projected_rejects_compressible() {
        let g = make_grid(2, 8, 1.5).unwrap();
        let u = VectorField::from_fn(&g, |x| [x[0].cos(), 0.0, 0.0]).unwrap();
        assert!(matches!(
            projected_nonlinear_term(&u),
            Err(Error::NotSolenoidal { .. })
        ));
    }

    #[test]
    fn quadratic_potential_examples() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let c = VectorField::from_fn(&g, |_| [1.0, 0.0, 0.0]).unwrap();
        let q = quadratic_potential(&c, &c).unwrap();
        assert!((q.coeff([0, 0, 0]) - C64::new(0.5, 0.0)).norm() < 1e-15);
        let tg = taylor_green(&g, 1.0);
        let q = quadratic_potential(&tg, &tg).unwrap();
        let expect = to_spectral(
            &g.sample(|x| {
                let (a, b) = (x[0].cos() * x[1].sin(), x[0].sin() * x[1].cos());
                0.5 * (a * a + b * b)
            }),
            &g,
        )
        .unwrap();
        assert!(l2_norm(&q.axpy(-1.0, &expect)) < 1e-14);
        let v = random_vector_field(&g, 1, 0.5, 5.0).unwrap();
        let w = random_vector_field(&g, 2, 0.5, 5.0).unwrap();
        let a = quadratic_potential(&v, &w).unwrap();
        let b = quadratic_potential(&w, &v).unwrap();
        assert!(l2_norm(&a.axpy(-1.0, &b)) < 1e-13);
    }

    #[test]
    fn diagonal_trilinear_vanishes() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let visc = ViscosityParams::new(1.0, 0.1, 1, 2).unwrap();
        let u = random_solenoidal(&g, 4, 1.0, 5.0).unwrap();
        let v = random_vector_field(&g, 5, 0.5, 5.0).unwrap();
        let r = trilinear_form(&u, &v, &v, &visc, 1.0).unwrap();
        assert!(r.value.abs() < 1e-13);
        assert!(r.antisymmetry_defect < 1e-13);
    }
}
