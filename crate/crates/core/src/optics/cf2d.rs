//! "CF2D" binary field dumps.
//!
//! Layout (all little-endian): magic `CF2D`, version u32 = 1, nx u32, ny u32,
//! dx f64, dy f64, wavelength f64, then nx·ny samples as (re f64, im f64),
//! row-major.

use std::io::{self, Read, Write};

use num_complex::Complex;
use thiserror::Error;

use super::{ComplexField2D, GridSpec};
use crate::scalar::Real;

pub const CF2D_MAGIC: &[u8; 4] = b"CF2D";
pub const CF2D_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum Cf2dError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a CF2D dump (bad magic)")]
    BadMagic,
    #[error("unsupported CF2D version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt CF2D header: {0}")]
    BadHeader(String),
}

pub fn write_cf2d<T: Real, W: Write>(field: &ComplexField2D<T>, mut w: W) -> Result<(), Cf2dError> {
    let g = &field.grid;
    let dim = |n: usize| {
        u32::try_from(n).map_err(|_| Cf2dError::BadHeader(format!("dimension {n} exceeds u32")))
    };
    w.write_all(CF2D_MAGIC)?;
    w.write_all(&CF2D_VERSION.to_le_bytes())?;
    w.write_all(&dim(g.nx)?.to_le_bytes())?;
    w.write_all(&dim(g.ny)?.to_le_bytes())?;
    for v in [g.dx, g.dy, g.wavelength] {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(field.data.len() * 16);
    for c in &field.data {
        buf.extend_from_slice(&c.re.to_f64_lossy().to_le_bytes());
        buf.extend_from_slice(&c.im.to_f64_lossy().to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, Cf2dError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, Cf2dError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_cf2d<T: Real, R: Read>(mut r: R) -> Result<ComplexField2D<T>, Cf2dError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CF2D_MAGIC {
        return Err(Cf2dError::BadMagic);
    }
    let version = read_u32(&mut r)?;
    if version != CF2D_VERSION {
        return Err(Cf2dError::UnsupportedVersion(version));
    }
    let nx = read_u32(&mut r)? as usize;
    let ny = read_u32(&mut r)? as usize;
    let dx = read_f64(&mut r)?;
    let dy = read_f64(&mut r)?;
    let wavelength = read_f64(&mut r)?;
    let grid = GridSpec::new(nx, ny, T::lit(dx), T::lit(dy), T::lit(wavelength))
        .map_err(|e| Cf2dError::BadHeader(e.to_string()))?;

    let mut raw = vec![0u8; grid.len() * 16];
    r.read_exact(&mut raw)?;
    let data = raw
        .chunks_exact(16)
        .map(|chunk| {
            let re = f64::from_le_bytes(chunk[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(chunk[8..].try_into().expect("8 bytes"));
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect();
    Ok(ComplexField2D { grid, data })
}
