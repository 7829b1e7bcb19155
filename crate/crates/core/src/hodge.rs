//! Hodge splitting of vector fields and pressure recovery.
//!
//! On the torus the harmonic fields are the constants, so `H` keeps the
//! `k = 0` coefficient, the Green operator inverts `|k|^2` off the mean, and
//! the Leray projector removes the component of each mode along `k`.

use crate::error::{Error, Result};
use crate::spectral::{
    divergence, divergence_defect, same_grid, ScalarField, SpectralField, VectorField, C64,
};

/// Tolerance on the relative divergence of fields declared solenoidal.
pub const SOLENOIDAL_TOL: f64 = 1e-10;

/// Orthogonal projection onto the harmonic (constant) fields.
pub fn harmonic_projection<F: SpectralField>(u: &F) -> F {
    u.map_modes(|i| if u.grid().k2(i) == 0.0 { 1.0 } else { 0.0 })
}

/// Green operator: `k != 0` coefficients divided by `|k|^2`, mean dropped.
pub fn green_operator<F: SpectralField>(u: &F) -> F {
    let grid = u.grid().clone();
    u.map_modes(|i| {
        let k2 = grid.k2(i);
        if k2 == 0.0 {
            0.0
        } else {
            1.0 / k2
        }
    })
}

/// Leray projection `u_hat - k (k . u_hat) / |k|^2`, mean untouched.
pub fn leray_project(u: &VectorField) -> VectorField {
    let grid = u.grid().clone();
    let dim = grid.dim();
    let mut out = u.clone();
    let mut kv = vec![C64::new(0.0, 0.0); dim];
    for i in 0..grid.len() {
        let k2 = grid.k2(i);
        if k2 == 0.0 {
            continue;
        }
        let k = grid.wavevector(i);
        let dot: C64 = (0..dim).map(|j| u.component(j)[i] * k[j] as f64).sum();
        for (j, z) in kv.iter_mut().enumerate() {
            *z = dot * (k[j] as f64 / k2);
        }
        for (j, z) in kv.iter().enumerate() {
            out.component_mut(j)[i] -= z;
        }
    }
    out
}

/// The three mutually orthogonal parts of a vector field.
#[derive(Clone, Debug)]
pub struct HodgeSplit {
    pub harmonic: VectorField,
    pub solenoidal: VectorField,
    pub gradient_part: VectorField,
}

impl HodgeSplit {
    pub fn reconstruct(&self) -> VectorField {
        &(&self.harmonic + &self.solenoidal) + &self.gradient_part
    }
}

/// `u = Hu + (P - H)u + (Id - P)u`.
pub fn hodge_split(u: &VectorField) -> HodgeSplit {
    let harmonic = harmonic_projection(u);
    let projected = leray_project(u);
    let solenoidal = &projected - &harmonic;
    let gradient_part = u - &projected;
    HodgeSplit {
        harmonic,
        solenoidal,
        gradient_part,
    }
}

/// Mean-zero pressure with `grad p = (Id - P)(f - convected)`, where
/// `convected = N(u)` comes from [`crate::nonlinear::nonlinear_term`].
pub fn recover_pressure(
    u: &VectorField,
    f: &VectorField,
    convected: &VectorField,
) -> Result<ScalarField> {
    if !same_grid(u.grid(), f.grid()) || !same_grid(u.grid(), convected.grid()) {
        return Err(Error::GridMismatch);
    }
    let defect = divergence_defect(u);
    if defect > SOLENOIDAL_TOL {
        return Err(Error::NotSolenoidal { defect });
    }
    let rhs = f - convected;
    // p = A* G (Id - P) rhs with A* = -div; div kills the solenoidal part.
    Ok(green_operator(&divergence(&rhs)).scaled(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinear::nonlinear_term;
    use crate::spectral::{
        gradient, inner, l2_norm, make_grid, random_scalar_field, random_vector_field,
        taylor_green, to_spectral,
    };

    #[test]
    fn harmonic_examples() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let c = VectorField::from_fn(&g, |_| [3.0, -1.0, 0.0]).unwrap();
        let hc = harmonic_projection(&c);
        assert!(l2_norm(&(&hc - &c)) < 1e-14);
        assert!(l2_norm(&harmonic_projection(&taylor_green(&g, 1.0))) < 1e-15);
        let u = random_vector_field(&g, 3, 0.5, 5.0).unwrap();
        let h = harmonic_projection(&u);
        assert!(l2_norm(&(&harmonic_projection(&h) - &h)) < 1e-15);
    }

    #[test]
    fn green_examples() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let mut f = ScalarField::zeros(&g);
        f.set_coeff([1, 2, 0], C64::new(5.0, 0.0));
        f.set_coeff([0, 0, 0], C64::new(2.0, 0.0));
        let gf = green_operator(&f);
        assert!((gf.coeff([1, 2, 0]) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(gf.coeff([0, 0, 0]), C64::new(0.0, 0.0));

        let u = random_vector_field(&g, 11, 0.5, 5.0).unwrap();
        let lap_g = crate::spectral::laplacian_power(&green_operator(&u), 1);
        let back = &lap_g + &harmonic_projection(&u);
        assert!(l2_norm(&(&back - &u)) < 1e-12);
    }

    #[test]
    fn leray_examples() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let sinx = to_spectral(&g.sample(|x| x[0].sin()), &g).unwrap();
        assert!(l2_norm(&leray_project(&gradient(&sinx))) < 1e-14);
        let tg = taylor_green(&g, 1.0);
        assert!(l2_norm(&(&leray_project(&tg) - &tg)) < 1e-14);
        let u = random_vector_field(&g, 1, 0.5, 5.0).unwrap();
        let v = random_vector_field(&g, 2, 0.5, 5.0).unwrap();
        let a = inner(&leray_project(&u), &v).unwrap();
        let b = inner(&u, &leray_project(&v)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn split_recovers_parts() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let tg = taylor_green(&g, 1.0);
        let q = to_spectral(&g.sample(|x| x[1].cos()), &g).unwrap();
        let grad = gradient(&q);
        let c = VectorField::from_fn(&g, |_| [0.5, -2.0, 0.0]).unwrap();
        let u = &(&tg + &grad) + &c;
        let s = hodge_split(&u);
        assert!(l2_norm(&(&s.solenoidal - &tg)) < 1e-12);
        assert!(l2_norm(&(&s.gradient_part - &grad)) < 1e-12);
        assert!(l2_norm(&(&s.harmonic - &c)) < 1e-12);

        let z = hodge_split(&VectorField::zeros(&g));
        assert_eq!(l2_norm(&z.reconstruct()), 0.0);
    }

    #[test]
    fn pressure_examples() {
        let g = make_grid(2, 16, 1.5).unwrap();
        let zero = VectorField::zeros(&g);
        let tg = taylor_green(&g, 1.0);
        let p = recover_pressure(&tg, &zero, &nonlinear_term(&tg).unwrap()).unwrap();
        let expect = to_spectral(
            &g.sample(|x| -0.25 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos())),
            &g,
        )
        .unwrap();
        assert!(l2_norm(&p.axpy(-1.0, &expect)) < 1e-13);

        let q = random_scalar_field(&g, 5, 1.0, 5.0).unwrap();
        let mean_free = q.axpy(-1.0, &harmonic_projection(&q));
        let shear = VectorField::from_fn(&g, |x| [x[1].sin(), 0.0, 0.0]).unwrap();
        let n = nonlinear_term(&shear).unwrap();
        assert!(l2_norm(&n) < 1e-14);
        let p = recover_pressure(&shear, &gradient(&q), &n).unwrap();
        assert!(l2_norm(&p.axpy(-1.0, &mean_free)) < 1e-13);
        let p0 = recover_pressure(&shear, &zero, &n).unwrap();
        assert!(l2_norm(&p0) < 1e-14);

        let bad = gradient(&q);
        assert!(matches!(
            recover_pressure(&bad, &zero, &zero),
            Err(Error::NotSolenoidal { .. })
        ));
    }
}
