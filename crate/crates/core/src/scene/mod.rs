//! Input beams, amplitude masks and the induced susceptibility map.

mod masks;
mod medium;

use num_complex::Complex;
use thiserror::Error;

use crate::lambda::LambdaError;
use crate::optics::{ComplexField2D, GridSpec, OpticsError};
use crate::scalar::Real;

pub use masks::{
    double_slit, glyph_mask, read_mask_pgm, write_mask_pgm, Glyph, Mask2D, GLYPH_ASPECT,
};
pub use medium::{susceptibility_from_coupling, ChiTable, CouplingMedium, MediumModel};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("feature of {size:.3e} m is too fine for {spacing:.3e} m sampling (needs ≥ {min_samples} samples)")]
    TooFine {
        size: f64,
        spacing: f64,
        min_samples: usize,
    },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("mask grid does not match field grid")]
    GridMismatch,
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error("mask file error: {0}")]
    MaskFile(String),
}

/// Centred Gaussian `A·exp(−r²/w²)` with a flat phase.
pub fn gaussian_beam<T: Real>(
    grid: GridSpec<T>,
    waist: T,
    amplitude: T,
) -> Result<ComplexField2D<T>, SceneError> {
    if !(waist > T::zero()) || !waist.is_finite() {
        return Err(SceneError::InvalidGeometry("waist must be positive".into()));
    }
    let inv_w2 = T::one() / (waist * waist);
    Ok(ComplexField2D::from_fn(grid, |x, y| {
        Complex::new(amplitude * (-(x * x + y * y) * inv_w2).exp(), T::zero())
    }))
}

/// Peak amplitude of a Gaussian beam `A·exp(−r²/w²)` carrying `power`.
pub fn gaussian_amplitude_for_power<T: Real>(power: T, waist: T) -> T {
    (T::lit(2.0) * power / (T::PI() * waist * waist)).sqrt()
}

/// Multiplies the field amplitude by the mask transmission.
pub fn apply_mask<T: Real>(
    field: &ComplexField2D<T>,
    mask: &Mask2D<T>,
) -> Result<ComplexField2D<T>, SceneError> {
    if !field.grid.same_sampling(&mask.grid) {
        return Err(SceneError::GridMismatch);
    }
    let data = field
        .data
        .iter()
        .zip(mask.transmission.iter())
        .map(|(c, &t)| c.scale(t))
        .collect();
    Ok(ComplexField2D {
        grid: field.grid,
        data,
    })
}
