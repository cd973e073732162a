//! 16-bit PGM rendering of intensities and field dumps.

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use super::HarnessError;
use crate::optics::{read_cf2d, ComplexField2D};
use crate::pgm::Pgm;

/// Scales `values` so the maximum maps to 65535; an all-zero input stays zero.
pub fn render_intensity(values: &[f64], width: usize, height: usize) -> Pgm {
    let max = values.iter().fold(0.0f64, |a, &v| a.max(v));
    let scale = if max > 0.0 { 65535.0 / max } else { 0.0 };
    let samples = values
        .iter()
        .map(|&v| (v * scale).round().clamp(0.0, 65535.0) as u16)
        .collect();
    Pgm {
        width,
        height,
        maxval: 65535,
        samples,
    }
}

pub fn render_field(field: &ComplexField2D<f64>) -> Pgm {
    render_intensity(&field.intensity(), field.grid.nx, field.grid.ny)
}

/// Reads a CF2D dump and writes its intensity as a 16-bit PGM.
pub fn render_cf2d(input: &Path, output: &Path) -> Result<(), HarnessError> {
    let file = fs::File::open(input).map_err(|e| HarnessError::io(input, e))?;
    let field: ComplexField2D<f64> = read_cf2d(BufReader::new(file))?;
    let out = fs::File::create(output).map_err(|e| HarnessError::io(output, e))?;
    render_field(&field).write(BufWriter::new(out))?;
    Ok(())
}
