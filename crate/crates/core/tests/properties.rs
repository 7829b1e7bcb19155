use std::sync::Arc;

use nsrg_core::evolution::{initial_value_potential, semigroup_factor};
use nsrg_core::hodge::{harmonic_projection, hodge_split, leray_project};
use nsrg_core::nonlinear::{nonlinear_term, trilinear_form};
use nsrg_core::spectral::{
    divergence, divergence_defect, gradient, inner, l2_norm, make_grid, random_scalar_field,
    random_solenoidal, random_vector_field, to_physical, to_spectral, Grid,
};
use nsrg_core::{SpectralField, VectorField, ViscosityParams};
use proptest::prelude::*;

fn grid(dim: usize) -> Arc<Grid> {
    make_grid(dim, if dim == 2 { 16 } else { 8 }, 1.5).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(32)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn physical_round_trip_and_parseval(seed in any::<u64>(), dim in 2usize..=3) {
        let g = grid(dim);
        let cutoff = (g.modes_per_axis() / 3) as f64;
        let s = random_scalar_field(&g, seed, 0.5, cutoff).unwrap();
        let x = to_physical(&s).unwrap();
        let back = to_spectral(&x, &g).unwrap();
        prop_assert!(l2_norm(&back.axpy(-1.0, &s)) < 1e-13);
        let cell = g.volume() / g.len() as f64;
        let physical: f64 = x.iter().map(|v| v * v).sum::<f64>() * cell;
        prop_assert!((physical - l2_norm(&s).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn gradient_is_minus_adjoint_of_divergence(seed in any::<u64>(), dim in 2usize..=3) {
        let g = grid(dim);
        let cutoff = (g.modes_per_axis() / 3) as f64;
        let p = random_scalar_field(&g, seed, 0.5, cutoff).unwrap();
        let u = random_vector_field(&g, seed ^ 0x5a5a, 0.5, cutoff).unwrap();
        let lhs = inner(&gradient(&p), &u).unwrap();
        let rhs = -inner(&p, &divergence(&u)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn leray_is_an_orthogonal_projection(seed in any::<u64>(), dim in 2usize..=3) {
        let g = grid(dim);
        let cutoff = (g.modes_per_axis() / 3) as f64;
        let u = random_vector_field(&g, seed, 0.5, cutoff).unwrap();
        let v = random_vector_field(&g, seed.wrapping_add(1), 0.5, cutoff).unwrap();
        let pu = leray_project(&u);
        prop_assert!(l2_norm(&(&leray_project(&pu) - &pu)) < 1e-13);
        let sym = inner(&pu, &v).unwrap() - inner(&u, &leray_project(&v)).unwrap();
        prop_assert!(sym.abs() < 1e-13);
        prop_assert!(divergence_defect(&pu) < 1e-13);
        prop_assert!(l2_norm(&pu) <= l2_norm(&u) * (1.0 + 1e-14));
        let split = hodge_split(&u);
        prop_assert!(l2_norm(&(&split.reconstruct() - &u)) < 1e-13);
        prop_assert!(l2_norm(&harmonic_projection(&split.gradient_part)) < 1e-13);
    }

    #[test]
    fn convection_is_antisymmetric(seed in any::<u64>(), dim in 2usize..=3) {
        let g = grid(dim);
        let cutoff = (g.modes_per_axis() / 3) as f64;
        let visc = ViscosityParams::new(1.0, 0.1, 1, 2).unwrap();
        let u = random_solenoidal(&g, seed, 1.0, cutoff).unwrap();
        let v = random_vector_field(&g, seed.wrapping_add(1), 0.5, cutoff).unwrap();
        let w = random_vector_field(&g, seed.wrapping_add(2), 0.5, cutoff).unwrap();
        let r = trilinear_form(&u, &v, &w, &visc, 1.0).unwrap();
        prop_assert!(r.antisymmetry_defect < 1e-11);
        prop_assert!(inner(&nonlinear_term(&u).unwrap(), &u).unwrap().abs() < 1e-11);
    }

    #[test]
    fn semigroup_is_a_contraction_semigroup(
        seed in any::<u64>(),
        s in 0.0f64..1.0,
        t in 0.0f64..1.0,
        eps in 0.0f64..0.2,
    ) {
        let g = grid(2);
        let visc = ViscosityParams::new(0.3, eps, 2, 2).unwrap();
        let u = random_solenoidal(&g, seed, 1.0, 5.0).unwrap();
        let a = initial_value_potential(&initial_value_potential(&u, s, &visc).unwrap(), t, &visc).unwrap();
        let b = initial_value_potential(&u, s + t, &visc).unwrap();
        prop_assert!(l2_norm(&(&a - &b)) < 1e-13);
        prop_assert!(l2_norm(&b) <= l2_norm(&u) * (1.0 + 1e-14));
        let f = semigroup_factor([1, 2, 0], t, &visc).unwrap();
        prop_assert!(f > 0.0 && f <= 1.0);
    }
}

#[test]
fn zero_field_is_fixed_by_every_operator() {
    let g = grid(3);
    let z = VectorField::zeros(&g);
    assert_eq!(leray_project(&z).max_abs(), 0.0);
    assert_eq!(nonlinear_term(&z).unwrap().max_abs(), 0.0);
    assert_eq!(divergence_defect(&z), 0.0);
}
