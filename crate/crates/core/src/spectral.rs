//! Torus grids, Fourier transforms and diagonal operator symbols.
//!
//! Coefficients are stored in FFT order along every axis (index `i` carries
//! wavenumber `i` for `i <= K/2` and `i - K` above), flattened row-major with
//! axis 0 slowest. A field is represented as
//!
//! ```text
//! u(x) = sum_k u_hat(k) exp(i k . x)
//! ```
//!
//! so `cos(x)` has coefficient 1/2 at `k = (+-1, 0)`. The Nyquist slot
//! (`|k_j| = K/2` on any axis) is held at zero on every stored field, which
//! keeps the derivative symbols exactly skew-adjoint.
//!
//! All L2-type quantities include the `(2 pi)^dim` volume factor.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const HERMITIAN_TOL: f64 = 1e-10;

/// Discretization of the torus `[0, 2pi)^dim` with `K` modes per axis.
pub struct Grid {
    dim: usize,
    modes: usize,
    pad_factor: f64,
    padded: usize,
    kvecs: Vec<[i64; 3]>,
    k2: Vec<f64>,
    /// Flat padded-grid index of each retained mode, `None` on Nyquist slots.
    pad_index: Vec<Option<usize>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    pad_fwd: Arc<dyn Fft<f64>>,
    pad_inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("modes", &self.modes)
            .field("pad_factor", &self.pad_factor)
            .field("padded", &self.padded)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.modes == other.modes && self.padded == other.padded
    }
}

/// Build a grid. `pad_factor` sets the oversampled grid used for products;
/// anything below 3/2 would alias quadratic terms back into the band.
pub fn make_grid(dim: usize, modes_per_axis: usize, pad_factor: f64) -> Result<Arc<Grid>> {
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
    }
    if modes_per_axis < 4 {
        return Err(Error::InvalidGrid(format!(
            "modes_per_axis must be >= 4, got {modes_per_axis}"
        )));
    }
    if !modes_per_axis.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "modes_per_axis must be even, got {modes_per_axis}"
        )));
    }
    if !pad_factor.is_finite() || pad_factor < 1.5 {
        return Err(Error::InvalidGrid(format!(
            "pad_factor must be >= 3/2, got {pad_factor}"
        )));
    }
    let k = modes_per_axis;
    let mut padded = (pad_factor * k as f64 - 1e-9).ceil() as usize;
    if padded % 2 == 1 {
        padded += 1;
    }

    let total = k.pow(dim as u32);
    let mut kvecs = Vec::with_capacity(total);
    let mut k2 = Vec::with_capacity(total);
    let mut pad_index = Vec::with_capacity(total);
    for flat in 0..total {
        let mut kv = [0i64; 3];
        let mut rem = flat;
        let mut nyquist = false;
        let mut pidx = 0usize;
        for axis in (0..dim).rev() {
            let i = rem % k;
            rem /= k;
            let w = wavenumber(i, k);
            if i == k / 2 {
                nyquist = true;
            }
            kv[axis] = w;
        }
        for &w in kv.iter().take(dim) {
            pidx = pidx * padded + w.rem_euclid(padded as i64) as usize;
        }
        kvecs.push(kv);
        k2.push((kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]) as f64);
        pad_index.push(if nyquist { None } else { Some(pidx) });
    }

    let mut planner = FftPlanner::new();
    Ok(Arc::new(Grid {
        dim,
        modes: k,
        pad_factor,
        padded,
        kvecs,
        k2,
        pad_index,
        fwd: planner.plan_fft_forward(k),
        inv: planner.plan_fft_inverse(k),
        pad_fwd: planner.plan_fft_forward(padded),
        pad_inv: planner.plan_fft_inverse(padded),
    }))
}

fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes_per_axis(&self) -> usize {
        self.modes
    }

    pub fn pad_factor(&self) -> f64 {
        self.pad_factor
    }

    /// Points per axis of the dealiasing grid.
    pub fn padded_per_axis(&self) -> usize {
        self.padded
    }

    /// Number of stored coefficients (and physical samples), `K^dim`.
    pub fn len(&self) -> usize {
        self.kvecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kvecs.is_empty()
    }

    pub fn padded_len(&self) -> usize {
        self.padded.pow(self.dim as u32)
    }

    /// Wavevector of a flat index; unused axes are 0.
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        self.kvecs[idx]
    }

    pub fn k2(&self, idx: usize) -> f64 {
        self.k2[idx]
    }

    pub fn is_retained(&self, idx: usize) -> bool {
        self.pad_index[idx].is_some()
    }

    /// Retained wavenumbers per axis, ascending (Nyquist excluded).
    pub fn axis_wavenumbers(&self) -> Vec<i64> {
        let h = (self.modes / 2) as i64;
        (-h + 1..h).collect()
    }

    /// Flat index of wavevector `k`, or `None` outside the retained band.
    pub fn index_of(&self, k: [i64; 3]) -> Option<usize> {
        let h = (self.modes / 2) as i64;
        let mut idx = 0usize;
        for (axis, &w) in k.iter().enumerate() {
            if axis >= self.dim {
                if w != 0 {
                    return None;
                }
                continue;
            }
            if w <= -h || w >= h {
                return None;
            }
            idx = idx * self.modes + w.rem_euclid(self.modes as i64) as usize;
        }
        Some(idx)
    }

    /// Index of `-k` for the mode at `idx`.
    pub fn conj_index(&self, idx: usize) -> usize {
        let k = self.kvecs[idx];
        let mut out = 0usize;
        for &w in k.iter().take(self.dim) {
            out = out * self.modes + (-w).rem_euclid(self.modes as i64) as usize;
        }
        out
    }

    /// Physical coordinates of sample `idx` on the `n`-point grid.
    pub fn point(&self, idx: usize, n: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            x[axis] = 2.0 * PI * (rem % n) as f64 / n as f64;
            rem /= n;
        }
        x
    }

    /// `(2 pi)^dim`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Sample `f` on the `K^dim` physical grid.
    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.point(i, self.modes))).collect()
    }

    /// Sample `f` on the padded grid.
    pub fn sample_padded(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        (0..self.padded_len())
            .map(|i| f(self.point(i, self.padded)))
            .collect()
    }

    pub(crate) fn forward_k(&self, data: &mut [C64]) {
        fft_nd(data, self.modes, self.dim, self.fwd.as_ref());
    }

    pub(crate) fn inverse_k(&self, data: &mut [C64]) {
        fft_nd(data, self.modes, self.dim, self.inv.as_ref());
    }

    /// Evaluate a coefficient array on the padded grid (complex values; real
    /// for Hermitian input).
    pub(crate) fn to_padded(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); self.padded_len()];
        for (c, p) in coeffs.iter().zip(&self.pad_index) {
            if let Some(p) = p {
                buf[*p] = *c;
            }
        }
        fft_nd(&mut buf, self.padded, self.dim, self.pad_inv.as_ref());
        buf
    }

    /// Inverse of [`Grid::to_padded`] followed by truncation to the band.
    pub(crate) fn truncate_padded(&self, mut buf: Vec<C64>) -> Vec<C64> {
        fft_nd(&mut buf, self.padded, self.dim, self.pad_fwd.as_ref());
        let scale = 1.0 / self.padded_len() as f64;
        self.pad_index
            .iter()
            .map(|p| match p {
                Some(p) => buf[*p] * scale,
                None => C64::new(0.0, 0.0),
            })
            .collect()
    }
}

/// Multi-dimensional unnormalized FFT, one axis at a time.
fn fft_nd(data: &mut [C64], n: usize, dim: usize, fft: &dyn Fft<f64>) {
    let total = data.len();
    let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![C64::new(0.0, 0.0); total];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = n * stride;
        let mut pos = 0;
        for base in (0..total).step_by(block) {
            for j in 0..stride {
                for i in 0..n {
                    buf[pos] = data[base + j + i * stride];
                    pos += 1;
                }
            }
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        pos = 0;
        for base in (0..total).step_by(block) {
            for j in 0..stride {
                for i in 0..n {
                    data[base + j + i * stride] = buf[pos];
                    pos += 1;
                }
            }
        }
    }
}

pub(crate) fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Common access to scalar and vector coefficient fields.
pub trait SpectralField: Clone {
    fn grid(&self) -> &Arc<Grid>;
    fn n_components(&self) -> usize;
    fn component(&self, c: usize) -> &[C64];
    fn component_mut(&mut self, c: usize) -> &mut [C64];

    /// New field with every coefficient multiplied by `mult(mode index)`.
    fn map_modes(&self, mult: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for c in 0..out.n_components() {
            for (i, z) in out.component_mut(c).iter_mut().enumerate() {
                *z *= mult(i);
            }
        }
        out
    }

    fn scaled(&self, a: f64) -> Self {
        self.map_modes(|_| a)
    }

    /// `self + a * other`; panics on grid mismatch.
    fn axpy(&self, a: f64, other: &Self) -> Self {
        assert!(same_grid(self.grid(), other.grid()), "grid mismatch");
        let mut out = self.clone();
        for c in 0..out.n_components() {
            for (z, w) in out.component_mut(c).iter_mut().zip(other.component(c)) {
                *z += w * a;
            }
        }
        out
    }

    fn max_abs(&self) -> f64 {
        (0..self.n_components())
            .flat_map(|c| self.component(c).iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    fn is_finite(&self) -> bool {
        (0..self.n_components()).all(|c| {
            self.component(c)
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
        })
    }
}

/// Fourier coefficients of a scalar field (pressure, potentials).
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<Grid>,
    coeffs: Vec<C64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Wrap raw coefficients; the Nyquist slots are zeroed.
    pub fn from_coeffs(grid: &Arc<Grid>, mut coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        for (i, z) in coeffs.iter_mut().enumerate() {
            if !grid.is_retained(i) {
                *z = C64::new(0.0, 0.0);
            }
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: [i64; 3]) -> C64 {
        self.grid
            .index_of(k)
            .map_or(C64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn set_coeff(&mut self, k: [i64; 3], value: C64) {
        if let Some(i) = self.grid.index_of(k) {
            self.coeffs[i] = value;
        }
    }

    pub fn to_physical(&self) -> Result<Vec<f64>> {
        to_physical(self)
    }
}

impl SpectralField for ScalarField {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    fn n_components(&self) -> usize {
        1
    }
    fn component(&self, _c: usize) -> &[C64] {
        &self.coeffs
    }
    fn component_mut(&mut self, _c: usize) -> &mut [C64] {
        &mut self.coeffs
    }
}

/// Fourier coefficients of a vector field, one array per axis.
#[derive(Clone, Debug)]
pub struct VectorField {
    grid: Arc<Grid>,
    comps: Vec<Vec<C64>>,
}

impl VectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            comps: vec![vec![C64::new(0.0, 0.0); grid.len()]; grid.dim()],
        }
    }

    pub fn from_components(grid: &Arc<Grid>, comps: Vec<ScalarField>) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(Error::ShapeMismatch {
                expected: grid.dim(),
                got: comps.len(),
            });
        }
        if comps.iter().any(|c| !same_grid(&c.grid, grid)) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: grid.clone(),
            comps: comps.into_iter().map(|c| c.coeffs).collect(),
        })
    }

    /// Transform one sample array per axis.
    pub fn from_physical(grid: &Arc<Grid>, samples: &[Vec<f64>]) -> Result<Self> {
        let comps = samples
            .iter()
            .map(|s| to_spectral(s, grid))
            .collect::<Result<Vec<_>>>()?;
        Self::from_components(grid, comps)
    }

    /// Sample an analytic vector field `f(x) -> [u_0, u_1, u_2]`.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Self> {
        let samples: Vec<Vec<f64>> = (0..grid.dim())
            .map(|c| grid.sample(|x| f(x)[c]))
            .collect();
        Self::from_physical(grid, &samples)
    }

    pub fn component_field(&self, c: usize) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            coeffs: self.comps[c].clone(),
        }
    }

    /// Coefficient vector at wavevector `k` (zero outside the band).
    pub fn coeff(&self, k: [i64; 3]) -> Vec<C64> {
        match self.grid.index_of(k) {
            Some(i) => self.comps.iter().map(|c| c[i]).collect(),
            None => vec![C64::new(0.0, 0.0); self.grid.dim()],
        }
    }

    pub fn set_coeff(&mut self, k: [i64; 3], value: &[C64]) {
        if let Some(i) = self.grid.index_of(k) {
            for (c, v) in self.comps.iter_mut().zip(value) {
                c[i] = *v;
            }
        }
    }

    pub fn to_physical(&self) -> Result<Vec<Vec<f64>>> {
        (0..self.grid.dim())
            .map(|c| to_physical(&self.component_field(c)))
            .collect()
    }

    /// Real samples of every component on the padded grid.
    pub fn padded_physical(&self) -> Vec<Vec<f64>> {
        self.comps
            .iter()
            .map(|c| self.grid.to_padded(c).into_iter().map(|z| z.re).collect())
            .collect()
    }
}

impl SpectralField for VectorField {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    fn n_components(&self) -> usize {
        self.comps.len()
    }
    fn component(&self, c: usize) -> &[C64] {
        &self.comps[c]
    }
    fn component_mut(&mut self, c: usize) -> &mut [C64] {
        &mut self.comps[c]
    }
}

impl std::ops::Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: Self) -> ScalarField {
        self.axpy(1.0, rhs)
    }
}

impl std::ops::Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: Self) -> ScalarField {
        self.axpy(-1.0, rhs)
    }
}

impl std::ops::Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: Self) -> VectorField {
        self.axpy(1.0, rhs)
    }
}

impl std::ops::Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: Self) -> VectorField {
        self.axpy(-1.0, rhs)
    }
}

impl std::ops::Mul<f64> for &VectorField {
    type Output = VectorField;
    fn mul(self, rhs: f64) -> VectorField {
        self.scaled(rhs)
    }
}

/// Forward transform of real samples on the `K^dim` grid.
pub fn to_spectral(samples: &[f64], grid: &Arc<Grid>) -> Result<ScalarField> {
    if samples.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    let mut buf: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    grid.forward_k(&mut buf);
    let scale = 1.0 / grid.len() as f64;
    for z in buf.iter_mut() {
        *z *= scale;
    }
    ScalarField::from_coeffs(grid, buf)
}

/// Inverse transform. Fails if the imaginary residue exceeds `1e-10` relative
/// to the field's magnitude, which only happens for non-Hermitian
/// (corrupted or complex-valued) coefficient arrays.
pub fn to_physical(field: &ScalarField) -> Result<Vec<f64>> {
    let mut buf = field.coeffs.clone();
    field.grid.inverse_k(&mut buf);
    let scale = buf.iter().map(|z| z.re.abs()).fold(1.0, f64::max);
    let residue = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { residue });
    }
    Ok(buf.into_iter().map(|z| z.re).collect())
}

pub fn gradient(p: &ScalarField) -> VectorField {
    let grid = &p.grid;
    let comps = (0..grid.dim())
        .map(|j| {
            p.coeffs
                .iter()
                .enumerate()
                .map(|(i, z)| z * C64::new(0.0, grid.kvecs[i][j] as f64))
                .collect()
        })
        .collect();
    VectorField {
        grid: grid.clone(),
        comps,
    }
}

pub fn divergence(u: &VectorField) -> ScalarField {
    let grid = &u.grid;
    let coeffs = (0..grid.len())
        .map(|i| {
            let k = grid.kvecs[i];
            u.comps
                .iter()
                .enumerate()
                .fold(C64::new(0.0, 0.0), |acc, (j, c)| {
                    acc + c[i] * C64::new(0.0, k[j] as f64)
                })
        })
        .collect();
    ScalarField {
        grid: grid.clone(),
        coeffs,
    }
}

/// `(-Lap)^m`: multiplies mode `k` by `|k|^{2m}`; `m = 0` is the identity.
pub fn laplacian_power<F: SpectralField>(u: &F, m: u32) -> F {
    let grid = u.grid().clone();
    u.map_modes(|i| grid.k2(i).powi(m as i32))
}

/// Real L2 pairing `Re sum conj(u_hat) v_hat * (2pi)^dim`.
pub fn inner<F: SpectralField>(u: &F, v: &F) -> Result<f64> {
    if !same_grid(u.grid(), v.grid()) || u.n_components() != v.n_components() {
        return Err(Error::GridMismatch);
    }
    Ok(weighted_pairing(u, v, |_| 1.0))
}

pub(crate) fn weighted_pairing<F: SpectralField>(u: &F, v: &F, w: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for c in 0..u.n_components() {
        for (i, (a, b)) in u.component(c).iter().zip(v.component(c)).enumerate() {
            acc += w(i) * (a.re * b.re + a.im * b.im);
        }
    }
    acc * u.grid().volume()
}

pub fn l2_norm<F: SpectralField>(u: &F) -> f64 {
    weighted_pairing(u, u, |_| 1.0).max(0.0).sqrt()
}

/// `(sum (1 + |k|^2)^s |u_hat|^2)^{1/2} (2pi)^{dim/2}`.
pub fn sobolev_norm<F: SpectralField>(u: &F, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "Sobolev index must be >= 0, got {s}"
        )));
    }
    let grid = u.grid().clone();
    Ok(weighted_pairing(u, u, |i| (1.0 + grid.k2(i)).powf(s))
        .max(0.0)
        .sqrt())
}

/// `||grad u||^2 = sum |k|^2 |u_hat|^2 (2pi)^dim`; equals `||Au||^2 + ||A*u||^2`
/// for a vector field.
pub fn gradient_sq<F: SpectralField>(u: &F) -> f64 {
    let grid = u.grid().clone();
    weighted_pairing(u, u, |i| grid.k2(i))
}

/// `||div u|| / ||u||`, zero for the zero field.
pub fn divergence_defect(u: &VectorField) -> f64 {
    let n = l2_norm(u);
    if n == 0.0 {
        0.0
    } else {
        l2_norm(&divergence(u)) / n
    }
}

/// Physical parameters of the regularized operator `V = eps (-Lap)^m - nu Lap`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViscosityParams {
    pub nu: f64,
    pub epsilon: f64,
    pub m: u32,
}

impl ViscosityParams {
    /// Validated constructor: `nu > 0`, `epsilon >= 0`, `m >= 1`, and for
    /// `epsilon > 0` the order condition `m >= ceil((dim + 2) / 4)`.
    pub fn new(nu: f64, epsilon: f64, m: u32, dim: usize) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParams(format!("nu must be > 0, got {nu}")));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParams(format!(
                "epsilon must be >= 0, got {epsilon}"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidParams("m must be >= 1".into()));
        }
        let min = Self::min_order(dim);
        if epsilon > 0.0 && m < min {
            return Err(Error::InvalidParams(format!(
                "m = {m} violates m >= ceil((n+2)/4) = {min} for n = {dim}"
            )));
        }
        Ok(Self { nu, epsilon, m })
    }

    /// Unchecked constructor for diagnostics (allows `nu = 0`).
    pub fn diagnostic(nu: f64, epsilon: f64, m: u32) -> Self {
        Self { nu, epsilon, m }
    }

    pub fn min_order(dim: usize) -> u32 {
        (dim as u32 + 2).div_ceil(4)
    }

    /// Symbol of `V` at `|k|^2 = k2`: `nu k2 + eps k2^m`.
    pub fn symbol(&self, k2: f64) -> f64 {
        self.nu * k2 + self.epsilon * k2.powi(self.m as i32)
    }
}

/// Energy inner product
/// `D(u, v) = eps (Lap^{m/2} u, Lap^{m/2} v) + nu ((Au, Av) + (A*u, A*v)) + (u, v)`.
pub fn dirichlet_form(u: &VectorField, v: &VectorField, visc: &ViscosityParams) -> Result<f64> {
    if !same_grid(&u.grid, &v.grid) {
        return Err(Error::GridMismatch);
    }
    if !(visc.nu >= 0.0 && visc.epsilon >= 0.0) {
        return Err(Error::InvalidParams(
            "Dirichlet form needs nu >= 0 and epsilon >= 0".into(),
        ));
    }
    let grid = u.grid.clone();
    Ok(weighted_pairing(u, v, |i| visc.symbol(grid.k2(i)) + 1.0))
}

fn canonical(k: [i64; 3]) -> bool {
    for w in k {
        if w != 0 {
            return w > 0;
        }
    }
    true
}

fn random_modes(
    grid: &Arc<Grid>,
    seed: u64,
    spectrum_slope: f64,
    cutoff: f64,
    ncomp: usize,
    include_mean: bool,
    shape: impl Fn([i64; 3], &mut [C64]),
) -> Result<Vec<Vec<C64>>> {
    if cutoff > grid.modes_per_axis() as f64 / 3.0 {
        return Err(Error::InvalidParams(format!(
            "cutoff {cutoff} exceeds K/3 = {}",
            grid.modes_per_axis() as f64 / 3.0
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps = vec![vec![C64::new(0.0, 0.0); grid.len()]; ncomp];
    let mut v = vec![C64::new(0.0, 0.0); ncomp];
    for i in 0..grid.len() {
        let k = grid.wavevector(i);
        let kk = grid.k2(i).sqrt();
        if !grid.is_retained(i) || kk > cutoff || !canonical(k) || (kk == 0.0 && !include_mean) {
            continue;
        }
        let amp = if kk == 0.0 { 1.0 } else { kk.powf(-spectrum_slope) };
        for z in v.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *z = C64::new(re, if kk == 0.0 { 0.0 } else { im }) * amp;
        }
        shape(k, &mut v);
        let j = grid.conj_index(i);
        for (c, z) in comps.iter_mut().zip(&v) {
            c[i] = *z;
            c[j] = z.conj();
        }
    }
    Ok(comps)
}

fn normalized(mut u: VectorField) -> VectorField {
    let n = l2_norm(&u);
    if n > 0.0 {
        u = u.scaled(1.0 / n);
    }
    u
}

/// Seeded divergence-free test field: Gaussian modes with shell amplitude
/// `|k|^{-spectrum_slope}` for `0 < |k| <= cutoff`, unit L2 norm, zero mean.
pub fn random_solenoidal(
    grid: &Arc<Grid>,
    seed: u64,
    spectrum_slope: f64,
    cutoff: f64,
) -> Result<VectorField> {
    let dim = grid.dim();
    let comps = random_modes(grid, seed, spectrum_slope, cutoff, dim, false, |k, v| {
        let k2: f64 = k.iter().map(|&w| (w * w) as f64).sum();
        let kv: C64 = (0..dim).map(|j| v[j] * k[j] as f64).sum();
        for j in 0..dim {
            v[j] -= kv * (k[j] as f64 / k2);
        }
    })?;
    Ok(normalized(VectorField {
        grid: grid.clone(),
        comps,
    }))
}

/// Seeded vector field without the divergence constraint (mean included),
/// unit L2 norm.
pub fn random_vector_field(
    grid: &Arc<Grid>,
    seed: u64,
    spectrum_slope: f64,
    cutoff: f64,
) -> Result<VectorField> {
    let comps = random_modes(grid, seed, spectrum_slope, cutoff, grid.dim(), true, |_, _| {})?;
    Ok(normalized(VectorField {
        grid: grid.clone(),
        comps,
    }))
}

/// Seeded scalar field with unit L2 norm.
pub fn random_scalar_field(
    grid: &Arc<Grid>,
    seed: u64,
    spectrum_slope: f64,
    cutoff: f64,
) -> Result<ScalarField> {
    let mut comps = random_modes(grid, seed, spectrum_slope, cutoff, 1, true, |_, _| {})?;
    let f = ScalarField {
        grid: grid.clone(),
        coeffs: comps.pop().unwrap(),
    };
    let n = l2_norm(&f);
    Ok(if n > 0.0 { f.scaled(1.0 / n) } else { f })
}

/// The 2-D Taylor-Green vortex `(cos x sin y, -sin x cos y)` scaled by
/// `amplitude`; on a 3-D grid the z-independent extension with zero third
/// component.
pub fn taylor_green(grid: &Arc<Grid>, amplitude: f64) -> VectorField {
    VectorField::from_fn(grid, |x| {
        [
            amplitude * x[0].cos() * x[1].sin(),
            -amplitude * x[0].sin() * x[1].cos(),
            0.0,
        ]
    })
    .expect("grid-shaped samples")
}
