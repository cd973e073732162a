//! Sampled transverse fields and paraxial propagation.
//!
//! Fields are stored row-major, `data[iy * nx + ix]`, with sample `ix`
//! located at `x = (ix − nx/2)·dx` so that the centre pixel sits on the
//! optical axis. Row 0 is the top of rendered images.

mod cf2d;
mod fft;
mod propagate;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

pub use cf2d::{read_cf2d, write_cf2d, Cf2dError, CF2D_MAGIC, CF2D_VERSION};
pub use fft::Fft2;
pub use propagate::{
    medium_screen, propagate_free, FnProvider, Propagator, SusceptibilityProvider, UniformProvider,
};

#[derive(Debug, Error)]
pub enum OpticsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch between field and {0}")]
    GridMismatch(&'static str),
    #[error("invalid propagation distance: {0}")]
    InvalidDistance(String),
    #[error("{fraction:.3e} of the power lies in the {frame}-pixel border frame ({stage})")]
    BorderEnergy {
        stage: String,
        fraction: f64,
        frame: usize,
    },
    #[error("field contains non-finite samples ({0})")]
    NonFinite(String),
    #[error("susceptibility provider failed: {0}")]
    Provider(#[source] Box<dyn std::error::Error + Send + Sync>),
}

/// Sampling of the transverse plane plus the optical wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub nx: usize,
    pub ny: usize,
    pub dx: T,
    pub dy: T,
    pub wavelength: T,
}

impl<T: Real> GridSpec<T> {
    pub const MIN_SAMPLES: usize = 64;

    pub fn new(nx: usize, ny: usize, dx: T, dy: T, wavelength: T) -> Result<Self, OpticsError> {
        let grid = Self {
            nx,
            ny,
            dx,
            dy,
            wavelength,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Square grid covering `window` metres with `n × n` samples.
    pub fn square(n: usize, window: T, wavelength: T) -> Result<Self, OpticsError> {
        let d = window / T::from_usize_lossy(n);
        Self::new(n, n, d, d, wavelength)
    }

    pub fn validate(&self) -> Result<(), OpticsError> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if n < Self::MIN_SAMPLES || !n.is_power_of_two() {
                return Err(OpticsError::InvalidGrid(format!(
                    "{name} = {n} must be a power of two ≥ {}",
                    Self::MIN_SAMPLES
                )));
            }
        }
        for (name, v) in [
            ("dx", self.dx),
            ("dy", self.dy),
            ("wavelength", self.wavelength),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(OpticsError::InvalidGrid(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, ix: usize) -> T {
        (T::from_usize_lossy(ix) - T::from_usize_lossy(self.nx / 2)) * self.dx
    }

    pub fn y(&self, iy: usize) -> T {
        (T::from_usize_lossy(iy) - T::from_usize_lossy(self.ny / 2)) * self.dy
    }

    pub fn window_x(&self) -> T {
        T::from_usize_lossy(self.nx) * self.dx
    }

    pub fn window_y(&self) -> T {
        T::from_usize_lossy(self.ny) * self.dy
    }

    /// Vacuum wavenumber 2π/λ.
    pub fn wavenumber(&self) -> T {
        T::TAU() / self.wavelength
    }

    pub fn pixel_area(&self) -> T {
        self.dx * self.dy
    }

    /// Exact equality of sample counts and spacings.
    pub fn same_sampling(&self, other: &Self) -> bool {
        self == other
    }
}

/// Complex scalar envelope sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D<T> {
    pub grid: GridSpec<T>,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> ComplexField2D<T> {
    pub fn zeros(grid: GridSpec<T>) -> Self {
        Self {
            grid,
            data: vec![Complex::new(T::zero(), T::zero()); grid.len()],
        }
    }

    /// Samples `f(x, y)` on the grid.
    pub fn from_fn(grid: GridSpec<T>, mut f: impl FnMut(T, T) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            for ix in 0..grid.nx {
                data.push(f(grid.x(ix), y));
            }
        }
        Self { grid, data }
    }

    pub fn from_vec(grid: GridSpec<T>, data: Vec<Complex<T>>) -> Result<Self, OpticsError> {
        if data.len() != grid.len() {
            return Err(OpticsError::InvalidGrid(format!(
                "{} samples for a {}×{} grid",
                data.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(Self { grid, data })
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex<T> {
        self.data[iy * self.grid.nx + ix]
    }

    /// Σ |E|² dx dy.
    pub fn power(&self) -> T {
        power(self)
    }

    pub fn intensity(&self) -> Vec<T> {
        self.data.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Fraction of the power inside the outer `frame` pixels of the window.
    pub fn border_fraction(&self, frame: usize) -> T {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut edge = T::zero();
        let mut total = T::zero();
        for iy in 0..ny {
            for ix in 0..nx {
                let p = self.data[iy * nx + ix].norm_sqr();
                total = total + p;
                if ix < frame || iy < frame || ix + frame >= nx || iy + frame >= ny {
                    edge = edge + p;
                }
            }
        }
        if total == T::zero() {
            T::zero()
        } else {
            edge / total
        }
    }

    /// Relative L2 distance ‖self − other‖ / ‖other‖.
    pub fn relative_distance(&self, other: &Self) -> T {
        let mut num = T::zero();
        let mut den = T::zero();
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            num = num + (a - b).norm_sqr();
            den = den + b.norm_sqr();
        }
        if den == T::zero() {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

/// Σ |E|² dx dy, in the units of |amplitude|² × area.
pub fn power<T: Real>(field: &ComplexField2D<T>) -> T {
    let sum = field
        .data
        .iter()
        .fold(T::zero(), |acc, c| acc + c.norm_sqr());
    sum * field.grid.pixel_area()
}

/// Complex susceptibility sampled on the same grid as the probe.
#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityMap<T> {
    pub grid: GridSpec<T>,
    pub chi: Vec<Complex<T>>,
}

impl<T: Real> SusceptibilityMap<T> {
    pub fn uniform(grid: GridSpec<T>, chi: Complex<T>) -> Self {
        Self {
            grid,
            chi: vec![chi; grid.len()],
        }
    }

    pub fn zeros(grid: GridSpec<T>) -> Self {
        Self::uniform(grid, Complex::new(T::zero(), T::zero()))
    }

    pub fn is_finite(&self) -> bool {
        self.chi
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Smallest Im χ over the map.
    pub fn min_imag(&self) -> T {
        self.chi.iter().fold(T::infinity(), |acc, c| acc.min(c.im))
    }
}

/// What to do when field energy approaches the window edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuardPolicy {
    Off,
    /// Record and log the event, keep going.
    #[default]
    Warn,
    /// Fail with [`OpticsError::BorderEnergy`].
    Strict,
}

/// One border-energy threshold crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderEvent {
    pub stage: String,
    pub fraction: f64,
}

/// Aliasing guard on the outer pixel frame of the window.
#[derive(Debug, Clone)]
pub struct BorderGuard {
    pub policy: GuardPolicy,
    pub threshold: f64,
    pub frame: usize,
    pub events: Vec<BorderEvent>,
}

impl Default for BorderGuard {
    fn default() -> Self {
        Self::new(GuardPolicy::Warn)
    }
}

impl BorderGuard {
    pub fn new(policy: GuardPolicy) -> Self {
        Self {
            policy,
            threshold: 1e-6,
            frame: 2,
            events: Vec::new(),
        }
    }

    pub fn off() -> Self {
        Self::new(GuardPolicy::Off)
    }

    pub fn check<T: Real>(
        &mut self,
        field: &ComplexField2D<T>,
        stage: &str,
    ) -> Result<(), OpticsError> {
        if !field.is_finite() {
            return Err(OpticsError::NonFinite(stage.to_string()));
        }
        if self.policy == GuardPolicy::Off {
            return Ok(());
        }
        let fraction = field.border_fraction(self.frame).to_f64_lossy();
        if fraction <= self.threshold {
            return Ok(());
        }
        match self.policy {
            GuardPolicy::Strict => Err(OpticsError::BorderEnergy {
                stage: stage.to_string(),
                fraction,
                frame: self.frame,
            }),
            _ => {
                log::warn!("border energy {fraction:.3e} at {stage}");
                self.events.push(BorderEvent {
                    stage: stage.to_string(),
                    fraction,
                });
                Ok(())
            }
        }
    }
}
