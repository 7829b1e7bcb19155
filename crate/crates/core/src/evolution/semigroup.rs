//! The heat semigroup `exp(-tV)` and the parabolic potentials built on it.

use crate::error::{Error, Result};
use crate::spectral::{same_grid, SpectralField, VectorField, ViscosityParams};

/// `exp(-t (nu |k|^2 + eps |k|^{2m}))`.
pub fn semigroup_factor(k: [i64; 3], t: f64, visc: &ViscosityParams) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
    Ok((-t * visc.symbol(k2)).exp())
}

/// Solution of the linear homogeneous problem at time `t`: `exp(-tV) u0`.
pub fn initial_value_potential(
    u0: &VectorField,
    t: f64,
    visc: &ViscosityParams,
) -> Result<VectorField> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let grid = u0.grid().clone();
    Ok(u0.map_modes(|i| (-t * visc.symbol(grid.k2(i))).exp()))
}

/// Time quadrature for the Duhamel integral `int_0^t exp(-(t-s)V) g(s) ds`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// Composite trapezoid on the full integrand.
    #[default]
    Trapezoid,
    /// Interval average of `g` integrated exactly against the kernel; exact
    /// for time-independent `g`.
    ExponentialExact,
    /// Cubic Lagrange interpolation of `g` on a four-node stencil,
    /// integrated against the kernel by 4-point Gauss-Legendre. Fourth order.
    Cubic,
}

const GL_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_8,
];

/// `(1 - exp(-z)) / z`, continuous at 0.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-300 {
        1.0
    } else {
        -(-z).exp_m1() / z
    }
}

fn lagrange(nodes: &[f64], j: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &xi)| (x - xi) / (nodes[j] - xi))
        .product()
}

/// Duhamel integral at every sample node: entry `n` approximates
/// `int_0^{n h} exp(-(n h - s)V) g(s) ds` from equispaced samples
/// `g(0), g(h), ...`. Entry 0 is zero.
pub fn volume_potential_path(
    samples: &[VectorField],
    h: f64,
    visc: &ViscosityParams,
    quadrature: Quadrature,
) -> Result<Vec<VectorField>> {
    let first = samples.first().ok_or(Error::EmptySamples)?;
    if h < 0.0 {
        return Err(Error::NegativeTime(h));
    }
    let grid = first.grid().clone();
    if samples.iter().any(|s| !same_grid(s.grid(), &grid)) {
        return Err(Error::GridMismatch);
    }
    let intervals = samples.len() - 1;
    let sigma: Vec<f64> = (0..grid.len()).map(|i| visc.symbol(grid.k2(i))).collect();
    let decay: Vec<f64> = sigma.iter().map(|s| (-s * h).exp()).collect();

    // Per-mode weights: the contribution of interval n is
    // sum_j weights[offset][j] (.) g[j0 + j], offset = n - j0.
    let stencil = match quadrature {
        Quadrature::Cubic => (intervals + 1).min(4),
        _ => 2,
    };
    let mut weights: Vec<Vec<Vec<f64>>> = Vec::new();
    match quadrature {
        Quadrature::Trapezoid => {
            weights.push(vec![
                decay.iter().map(|e| 0.5 * h * e).collect(),
                vec![0.5 * h; grid.len()],
            ]);
        }
        Quadrature::ExponentialExact => {
            let w: Vec<f64> = sigma.iter().map(|s| 0.5 * h * phi1(s * h)).collect();
            weights.push(vec![w.clone(), w]);
        }
        Quadrature::Cubic => {
            let nodes: Vec<f64> = (0..stencil).map(|j| j as f64).collect();
            for offset in 0..stencil.saturating_sub(1) {
                let per_node = (0..stencil)
                    .map(|j| {
                        sigma
                            .iter()
                            .map(|s| {
                                GL_NODES
                                    .iter()
                                    .zip(GL_WEIGHTS)
                                    .map(|(x, w)| {
                                        let xi = 0.5 * (1.0 + x);
                                        0.5 * w
                                            * h
                                            * lagrange(&nodes, j, offset as f64 + xi)
                                            * (-s * h * (1.0 - xi)).exp()
                                    })
                                    .sum()
                            })
                            .collect()
                    })
                    .collect();
                weights.push(per_node);
            }
        }
    }

    let mut out = Vec::with_capacity(samples.len());
    let mut acc = VectorField::zeros(&grid);
    out.push(acc.clone());
    for n in 0..intervals {
        let (j0, offset) = match quadrature {
            Quadrature::Cubic => {
                let j0 = n.saturating_sub(1).min(intervals + 1 - stencil);
                (j0, n - j0)
            }
            _ => (n, 0),
        };
        let w = &weights[offset];
        for c in 0..grid.dim() {
            let dst = acc.component_mut(c);
            for (i, z) in dst.iter_mut().enumerate() {
                let mut s = *z * decay[i];
                for (j, wj) in w.iter().enumerate() {
                    s += samples[j0 + j].component(c)[i] * wj[i];
                }
                *z = s;
            }
        }
        out.push(acc.clone());
    }
    Ok(out)
}

/// Duhamel integral at the final time `t` from equispaced samples of the
/// source on `[0, t]`.
pub fn volume_potential(
    samples: &[VectorField],
    t: f64,
    visc: &ViscosityParams,
    quadrature: Quadrature,
) -> Result<VectorField> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if samples.len() == 1 {
        return Ok(VectorField::zeros(samples[0].grid()));
    }
    let h = t / (samples.len() - 1) as f64;
    Ok(volume_potential_path(samples, h, visc, quadrature)?
        .pop()
        .expect("non-empty path"))
}
