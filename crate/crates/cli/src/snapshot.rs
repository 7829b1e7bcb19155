//! Binary snapshot files.
//!
//! Layout, all little-endian: `b"NSRG"`, `u32` format version, `u32` dim,
//! `u32` modes per axis, `u32` m, `f64` epsilon, `f64` nu, `f64` t, then
//! each component's `K^dim` coefficients in storage order (row-major, axis 0
//! slowest, each axis in FFT order `0, 1, .., K/2, -K/2+1, .., -1`) as
//! interleaved `(re, im)` `f64` pairs. The number of components (1 for a
//! scalar, `dim` for a vector) follows from the file length.

use std::io::{self, Read, Write};
use std::path::Path;
use std::sync::Arc;

use nsrg_core::spectral::{ScalarField, C64};
use nsrg_core::{Grid, SpectralField, VectorField, ViscosityParams};

pub const MAGIC: &[u8; 4] = b"NSRG";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 4 + 3 * 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub dim: u32,
    pub modes_per_axis: u32,
    pub m: u32,
    pub epsilon: f64,
    pub nu: f64,
    pub t: f64,
    pub components: Vec<Vec<C64>>,
}

impl Snapshot {
    pub fn from_field<F: SpectralField>(u: &F, visc: &ViscosityParams, t: f64) -> Self {
        let grid = u.grid();
        Self {
            dim: grid.dim() as u32,
            modes_per_axis: grid.modes_per_axis() as u32,
            m: visc.m,
            epsilon: visc.epsilon,
            nu: visc.nu,
            t,
            components: (0..u.n_components()).map(|c| u.component(c).to_vec()).collect(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n: usize = self.components.iter().map(Vec::len).sum();
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * n);
        out.extend_from_slice(MAGIC);
        for v in [FORMAT_VERSION, self.dim, self.modes_per_axis, self.m] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in [self.epsilon, self.nu, self.t] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for z in self.components.iter().flatten() {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> io::Result<Self> {
        let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(bad("not an NSRG snapshot".into()));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != FORMAT_VERSION {
            return Err(bad(format!("unsupported snapshot version {version}")));
        }
        let (dim, k, m) = (u32_at(8), u32_at(12), u32_at(16));
        if !(2..=3).contains(&dim) || k == 0 {
            return Err(bad(format!("invalid header: dim {dim}, modes {k}")));
        }
        let per_component = (k as usize).pow(dim) * 16;
        let payload = bytes.len() - HEADER_LEN;
        let n_comp = payload / per_component;
        if !payload.is_multiple_of(per_component) || !(n_comp == 1 || n_comp == dim as usize) {
            return Err(bad(format!(
                "payload of {payload} bytes is neither 1 nor {dim} components of {per_component} bytes"
            )));
        }
        let data = &bytes[HEADER_LEN..];
        let components = (0..n_comp)
            .map(|c| {
                data[c * per_component..(c + 1) * per_component]
                    .chunks_exact(16)
                    .map(|p| {
                        C64::new(
                            f64::from_le_bytes(p[..8].try_into().unwrap()),
                            f64::from_le_bytes(p[8..].try_into().unwrap()),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            dim,
            modes_per_axis: k,
            m,
            epsilon: f64_at(20),
            nu: f64_at(28),
            t: f64_at(36),
            components,
        })
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        f.sync_all()
    }

    pub fn read(path: &Path) -> io::Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    fn check_grid(&self, grid: &Arc<Grid>) -> io::Result<()> {
        if grid.dim() as u32 != self.dim || grid.modes_per_axis() as u32 != self.modes_per_axis {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                "snapshot does not match the grid",
            ));
        }
        Ok(())
    }

    pub fn to_vector_field(&self, grid: &Arc<Grid>) -> io::Result<VectorField> {
        self.check_grid(grid)?;
        let mut u = VectorField::zeros(grid);
        if self.components.len() != grid.dim() {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "snapshot is not a vector field"));
        }
        for (c, data) in self.components.iter().enumerate() {
            u.component_mut(c).copy_from_slice(data);
        }
        Ok(u)
    }

    pub fn to_scalar_field(&self, grid: &Arc<Grid>) -> io::Result<ScalarField> {
        self.check_grid(grid)?;
        if self.components.len() != 1 {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "snapshot is not a scalar field"));
        }
        ScalarField::from_coeffs(grid, self.components[0].clone())
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))
    }
}
