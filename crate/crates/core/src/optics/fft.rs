use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// Unnormalized 2D FFT over a row-major `nx × ny` buffer.
///
/// Rows are transformed in place; columns go through a transposed copy.
/// The inverse carries the 1/(nx·ny) factor.
pub struct Fft2<T: Real> {
    nx: usize,
    ny: usize,
    row_fwd: Arc<dyn Fft<T>>,
    row_inv: Arc<dyn Fft<T>>,
    col_fwd: Arc<dyn Fft<T>>,
    col_inv: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for Fft2<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .finish()
    }
}

impl<T: Real> Fft2<T> {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            row_fwd: planner.plan_fft_forward(nx),
            row_inv: planner.plan_fft_inverse(nx),
            col_fwd: planner.plan_fft_forward(ny),
            col_inv: planner.plan_fft_inverse(ny),
        }
    }

    pub fn forward(&self, data: &mut [Complex<T>]) {
        self.run(data, &self.row_fwd, &self.col_fwd);
    }

    pub fn inverse(&self, data: &mut [Complex<T>]) {
        self.run(data, &self.row_inv, &self.col_inv);
        let scale = T::one() / T::from_usize_lossy(self.nx * self.ny);
        for c in data.iter_mut() {
            *c = c.scale(scale);
        }
    }

    fn run(&self, data: &mut [Complex<T>], rows: &Arc<dyn Fft<T>>, cols: &Arc<dyn Fft<T>>) {
        assert_eq!(
            data.len(),
            self.nx * self.ny,
            "buffer does not match FFT size"
        );
        let scratch_len = rows
            .get_inplace_scratch_len()
            .max(cols.get_inplace_scratch_len());
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); scratch_len];
        rows.process_with_scratch(data, &mut scratch);

        let mut transposed = vec![Complex::new(T::zero(), T::zero()); data.len()];
        transpose(data, &mut transposed, self.nx, self.ny);
        cols.process_with_scratch(&mut transposed, &mut scratch);
        transpose(&transposed, data, self.ny, self.nx);
    }
}

/// `src` is `rows × cols` (row-major, rows = height); `dst` becomes `cols × rows`.
fn transpose<T: Copy>(src: &[T], dst: &mut [T], cols: usize, rows: usize) {
    const BLOCK: usize = 32;
    for r0 in (0..rows).step_by(BLOCK) {
        for c0 in (0..cols).step_by(BLOCK) {
            for r in r0..(r0 + BLOCK).min(rows) {
                for c in c0..(c0 + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Angular spatial frequencies `2π·fftfreq(n, d)`.
pub(crate) fn angular_frequencies<T: Real>(n: usize, d: T) -> Vec<T> {
    let span = T::from_usize_lossy(n) * d;
    (0..n)
        .map(|i| {
            let m = if i < n.div_ceil(2) {
                i as i64
            } else {
                i as i64 - n as i64
            };
            T::TAU() * T::lit(m as f64) / span
        })
        .collect()
}
