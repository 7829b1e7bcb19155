//! Pseudospectral toolkit for the hyperviscosity-regularized incompressible
//! Navier-Stokes equations
//!
//! ```text
//! u_t + eps (-Lap)^m u - nu Lap u + (u . grad) u + grad p = f,   div u = 0
//! ```
//!
//! on the flat torus `[0, 2pi)^n`, `n` in `{2, 3}`.
//!
//! Every operator is diagonal (or a dealiased product) in the Fourier basis:
//!
//! * [`spectral`] grids, transforms, derivative symbols, norms and the
//!   Dirichlet form,
//! * [`hodge`] harmonic/Green/Leray projections and pressure recovery,
//! * [`nonlinear`] dealiased convection, the trilinear form and the
//!   quadratic potential,
//! * [`evolution`] the semigroup, Duhamel potentials and three solvers
//!   (integrating-factor stepper, dense Galerkin oracle, Picard iteration),
//! * [`diagnostics`] the energy ledger and executable a priori estimates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod hodge;
pub mod nonlinear;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Grid, ScalarField, SpectralField, VectorField, ViscosityParams};
