//! Angular-spectrum diffraction and the symmetric split-step solver.

use num_complex::Complex;

use super::fft::{angular_frequencies, Fft2};
use super::{BorderGuard, ComplexField2D, GridSpec, OpticsError, SusceptibilityMap};
use crate::scalar::Real;

/// Supplies the susceptibility at successive planes inside the medium.
///
/// Planes are requested in increasing `z`; `index` counts planes from the
/// entrance (index 0, z = 0) and the last plane sits exactly at the medium
/// length even when the final step is shortened.
pub trait SusceptibilityProvider<T: Real> {
    fn chi_at(&mut self, index: usize, z: T) -> Result<&SusceptibilityMap<T>, OpticsError>;
}

/// The same map at every plane.
#[derive(Debug, Clone)]
pub struct UniformProvider<T> {
    pub map: SusceptibilityMap<T>,
}

impl<T: Real> SusceptibilityProvider<T> for UniformProvider<T> {
    fn chi_at(&mut self, _index: usize, _z: T) -> Result<&SusceptibilityMap<T>, OpticsError> {
        Ok(&self.map)
    }
}

/// Wraps a closure `(index, z) → map`.
pub struct FnProvider<T, F> {
    f: F,
    current: Option<SusceptibilityMap<T>>,
}

impl<T, F> FnProvider<T, F> {
    pub fn new(f: F) -> Self {
        Self { f, current: None }
    }
}

impl<T, F> SusceptibilityProvider<T> for FnProvider<T, F>
where
    T: Real,
    F: FnMut(usize, T) -> Result<SusceptibilityMap<T>, OpticsError>,
{
    fn chi_at(&mut self, index: usize, z: T) -> Result<&SusceptibilityMap<T>, OpticsError> {
        let map = (self.f)(index, z)?;
        Ok(self.current.insert(map))
    }
}

/// Paraxial propagator bound to one grid.
///
/// Holds the FFT plans and the squared transverse wavenumber of every
/// spectral bin; each call allocates its own working buffers.
#[derive(Debug)]
pub struct Propagator<T: Real> {
    grid: GridSpec<T>,
    fft: Fft2<T>,
    kt2: Vec<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(grid: GridSpec<T>) -> Result<Self, OpticsError> {
        grid.validate()?;
        let kx = angular_frequencies(grid.nx, grid.dx);
        let ky = angular_frequencies(grid.ny, grid.dy);
        let mut kt2 = Vec::with_capacity(grid.len());
        for ky in &ky {
            for kx in &kx {
                kt2.push(*kx * *kx + *ky * *ky);
            }
        }
        Ok(Self {
            grid,
            fft: Fft2::new(grid.nx, grid.ny),
            kt2,
        })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    /// H(kx, ky) = exp(−i (kx² + ky²) z / 2k) for every spectral bin.
    pub fn transfer_function(&self, z: T) -> Vec<Complex<T>> {
        let factor = z / (T::lit(2.0) * self.grid.wavenumber());
        self.kt2
            .iter()
            .map(|&q| Complex::from_polar(T::one(), -q * factor))
            .collect()
    }

    /// Multiplies the spectrum of `data` by `transfer`.
    pub fn apply_transfer(&self, data: &mut [Complex<T>], transfer: &[Complex<T>]) {
        self.fft.forward(data);
        for (c, h) in data.iter_mut().zip(transfer.iter()) {
            *c = *c * *h;
        }
        self.fft.inverse(data);
    }

    /// Forward spectrum of `field`, for repeated propagation from one plane.
    pub fn spectrum(&self, field: &ComplexField2D<T>) -> Result<Vec<Complex<T>>, OpticsError> {
        self.check_grid(&field.grid, "propagator")?;
        let mut data = field.data.clone();
        self.fft.forward(&mut data);
        Ok(data)
    }

    /// Field a distance `z` downstream of the plane whose spectrum is given.
    pub fn from_spectrum(&self, spectrum: &[Complex<T>], z: T) -> ComplexField2D<T> {
        let factor = z / (T::lit(2.0) * self.grid.wavenumber());
        let mut data: Vec<Complex<T>> = spectrum
            .iter()
            .zip(self.kt2.iter())
            .map(|(c, &q)| *c * Complex::from_polar(T::one(), -q * factor))
            .collect();
        self.fft.inverse(&mut data);
        ComplexField2D {
            grid: self.grid,
            data,
        }
    }

    fn check_grid(&self, grid: &GridSpec<T>, what: &'static str) -> Result<(), OpticsError> {
        if self.grid.same_sampling(grid) {
            Ok(())
        } else {
            Err(OpticsError::GridMismatch(what))
        }
    }

    /// Free-space propagation over `z ≥ 0` in one spectral step.
    pub fn propagate_free(
        &self,
        field: &ComplexField2D<T>,
        z: T,
        guard: &mut BorderGuard,
    ) -> Result<ComplexField2D<T>, OpticsError> {
        self.check_grid(&field.grid, "propagator")?;
        if !(z >= T::zero()) || !z.is_finite() {
            return Err(OpticsError::InvalidDistance(format!("z = {z} must be ≥ 0")));
        }
        guard.check(field, "free-space input")?;
        let mut out = field.clone();
        if z > T::zero() {
            let h = self.transfer_function(z);
            self.apply_transfer(&mut out.data, &h);
        }
        guard.check(&out, "free-space output")?;
        Ok(out)
    }

    /// Symmetric split-step propagation through a medium of `length`.
    ///
    /// Each step of length h applies exp(ikχ(z_a)h/4), the diffraction
    /// transfer for h, then exp(ikχ(z_b)h/4). Adjacent half-screens that act
    /// on the same plane are merged.
    pub fn propagate_medium<P: SusceptibilityProvider<T> + ?Sized>(
        &self,
        field: &ComplexField2D<T>,
        provider: &mut P,
        length: T,
        dz: T,
        guard: &mut BorderGuard,
    ) -> Result<ComplexField2D<T>, OpticsError> {
        self.check_grid(&field.grid, "propagator")?;
        if !(length > T::zero()) || !length.is_finite() {
            return Err(OpticsError::InvalidDistance(format!(
                "length = {length} must be > 0"
            )));
        }
        if !(dz > T::zero()) || dz > length {
            return Err(OpticsError::InvalidDistance(format!(
                "dz = {dz} must lie in (0, length]"
            )));
        }
        guard.check(field, "medium input")?;

        let planes = plane_positions(length, dz);
        let full_transfer = self.transfer_function(dz);
        let k = self.grid.wavenumber();
        let mut data = field.data.clone();

        for (step, pair) in planes.windows(2).enumerate() {
            let (za, zb) = (pair[0], pair[1]);
            let h = zb - za;
            if step == 0 {
                let chi = provider.chi_at(0, za)?;
                self.check_grid(&chi.grid, "susceptibility map")?;
                apply_screen(&mut data, chi, k, h / T::lit(2.0));
            }
            if (h - dz).abs() <= dz * T::lit(1e-9) {
                self.apply_transfer(&mut data, &full_transfer);
            } else {
                let partial = self.transfer_function(h);
                self.apply_transfer(&mut data, &partial);
            }
            // Half screen closing this step plus the one opening the next.
            let next_h = planes.get(step + 2).map(|&zc| zc - zb).unwrap_or(T::zero());
            let chi = provider.chi_at(step + 1, zb)?;
            self.check_grid(&chi.grid, "susceptibility map")?;
            apply_screen(&mut data, chi, k, (h + next_h) / T::lit(2.0));
        }

        let out = ComplexField2D {
            grid: field.grid,
            data,
        };
        guard.check(&out, "medium output")?;
        Ok(out)
    }
}

/// Plane positions 0, dz, 2dz, …, length with a shortened last step.
fn plane_positions<T: Real>(length: T, dz: T) -> Vec<T> {
    let ratio = length / dz;
    let mut steps = ratio.ceil().to_usize().unwrap_or(1).max(1);
    // A hair above an integer is rounding noise, not an extra step.
    if steps > 1 && ratio - T::from_usize_lossy(steps - 1) < T::lit(1e-9) {
        steps -= 1;
    }
    let mut z: Vec<T> = (0..steps).map(|i| T::from_usize_lossy(i) * dz).collect();
    z.push(length);
    z
}

/// exp(i k χ len / 2) applied pointwise.
fn apply_screen<T: Real>(data: &mut [Complex<T>], chi: &SusceptibilityMap<T>, k: T, len: T) {
    let factor = k * len / T::lit(2.0);
    for (c, x) in data.iter_mut().zip(chi.chi.iter()) {
        if x.re == T::zero() && x.im == T::zero() {
            continue;
        }
        let phase = Complex::new(-x.im * factor, x.re * factor).exp();
        *c = *c * phase;
    }
}

/// Thin medium slice: multiplies by exp(i k χ(x, y) dz / 2).
pub fn medium_screen<T: Real>(
    field: &ComplexField2D<T>,
    chi: &SusceptibilityMap<T>,
    dz: T,
) -> Result<ComplexField2D<T>, OpticsError> {
    if !field.grid.same_sampling(&chi.grid) {
        return Err(OpticsError::GridMismatch("susceptibility map"));
    }
    if !(dz > T::zero()) || !dz.is_finite() {
        return Err(OpticsError::InvalidDistance(format!(
            "dz = {dz} must be > 0"
        )));
    }
    let mut out = field.clone();
    apply_screen(&mut out.data, chi, field.grid.wavenumber(), dz);
    Ok(out)
}

/// One-shot free-space propagation with a temporary [`Propagator`].
pub fn propagate_free<T: Real>(
    field: &ComplexField2D<T>,
    z: T,
    guard: &mut BorderGuard,
) -> Result<ComplexField2D<T>, OpticsError> {
    Propagator::new(field.grid)?.propagate_free(field, z, guard)
}

#[cfg(test)]
mod tests {
    use super::plane_positions;

    #[test]
    fn planes_cover_length_exactly() {
        assert_eq!(
            plane_positions(1.0f64, 0.25),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        let p = plane_positions(1.0f64, 0.3);
        assert_eq!(p.len(), 5);
        assert_eq!(*p.last().unwrap(), 1.0);
        assert!((p[3] - 0.9).abs() < 1e-15);
        assert_eq!(plane_positions(0.05f64, 0.05), vec![0.0, 0.05]);
        assert_eq!(plane_positions(0.05f64, 0.0005).len(), 101);
    }
}
