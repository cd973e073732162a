//! Susceptibility induced by a spatially structured coupling beam.
//!
//! χ depends on the local coupling only through |G|: the phase of G can be
//! absorbed into the definition of |1⟩. Per-pixel χ is therefore read from
//! a table over |G|, built once per (params, g, N).

use num_complex::Complex;
use rayon::prelude::*;

use crate::lambda::{probe_susceptibility, DriveParams, LambdaError, LambdaParams};
use crate::optics::{
    ComplexField2D, OpticsError, Propagator, SusceptibilityMap, SusceptibilityProvider,
};
use crate::scalar::Real;

/// χ(|G|) sampled uniformly on [0, max_rabi] with linear interpolation.
#[derive(Debug, Clone)]
pub struct ChiTable<T> {
    params: LambdaParams<T>,
    probe_rabi: T,
    density: T,
    max_rabi: T,
    step: T,
    values: Vec<Complex<T>>,
}

impl<T: Real> ChiTable<T> {
    pub const MIN_POINTS: usize = 512;
    pub const DEFAULT_POINTS: usize = 16384;

    pub fn new(
        params: LambdaParams<T>,
        probe_rabi: T,
        density: T,
        max_rabi: T,
        points: usize,
    ) -> Result<Self, LambdaError> {
        if points < Self::MIN_POINTS {
            return Err(LambdaError::InvalidParams(format!(
                "lookup table needs at least {} points",
                Self::MIN_POINTS
            )));
        }
        if !(max_rabi > T::zero()) || !max_rabi.is_finite() {
            return Err(LambdaError::InvalidParams(
                "table range must be positive".into(),
            ));
        }
        let step = max_rabi / T::from_usize_lossy(points - 1);
        let values = (0..points)
            .into_par_iter()
            .map(|i| {
                let drives = DriveParams::real(probe_rabi, step * T::from_usize_lossy(i));
                probe_susceptibility(&params, &drives, density).map(|r| r.chi)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            params,
            probe_rabi,
            density,
            max_rabi,
            step,
            values,
        })
    }

    pub fn max_rabi(&self) -> T {
        self.max_rabi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest |χ| over the table.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, c| a.max(c.norm()))
    }

    /// Smallest Im χ over the table.
    pub fn min_imag(&self) -> T {
        self.values.iter().fold(T::infinity(), |a, c| a.min(c.im))
    }

    /// Exact steady-state χ at coupling magnitude `coupling_abs`.
    pub fn direct(&self, coupling_abs: T) -> Result<Complex<T>, LambdaError> {
        let drives = DriveParams::real(self.probe_rabi, coupling_abs);
        probe_susceptibility(&self.params, &drives, self.density).map(|r| r.chi)
    }

    /// Interpolated χ; magnitudes past the table range fall back to a direct solve.
    pub fn evaluate(&self, coupling_abs: T) -> Result<Complex<T>, LambdaError> {
        let u = coupling_abs / self.step;
        let last = self.values.len() - 1;
        if !(u >= T::zero()) {
            return Err(LambdaError::InvalidParams(
                "coupling magnitude must be ≥ 0".into(),
            ));
        }
        if u > T::from_usize_lossy(last) {
            return self.direct(coupling_abs);
        }
        let i = u.floor().to_usize().unwrap_or(0).min(last - 1);
        let frac = u - T::from_usize_lossy(i);
        Ok(self.values[i] + (self.values[i + 1] - self.values[i]).scale(frac))
    }
}

/// Maps a coupling field to χ(x, y) at fixed probe Rabi frequency and density.
#[derive(Debug, Clone)]
pub struct MediumModel<T> {
    pub params: LambdaParams<T>,
    pub probe_rabi: T,
    pub density: T,
    /// Rabi frequency per unit coupling amplitude.
    pub rabi_scale: T,
    /// `None` selects per-pixel direct solves.
    pub table: Option<ChiTable<T>>,
}

impl<T: Real> MediumModel<T> {
    /// Table-backed model covering |G| up to `headroom × nominal_coupling`.
    pub fn tabulated(
        params: LambdaParams<T>,
        probe_rabi: T,
        density: T,
        rabi_scale: T,
        nominal_coupling: T,
        headroom: T,
    ) -> Result<Self, LambdaError> {
        validate_scale(rabi_scale)?;
        let table = if density == T::zero() {
            None
        } else {
            // A dark coupling beam still needs a non-empty range.
            let range = if nominal_coupling > T::zero() {
                nominal_coupling * headroom
            } else {
                params.gamma
            };
            Some(ChiTable::new(
                params,
                probe_rabi,
                density,
                range,
                ChiTable::<T>::DEFAULT_POINTS,
            )?)
        };
        Ok(Self {
            params,
            probe_rabi,
            density,
            rabi_scale,
            table,
        })
    }

    pub fn direct(
        params: LambdaParams<T>,
        probe_rabi: T,
        density: T,
        rabi_scale: T,
    ) -> Result<Self, LambdaError> {
        validate_scale(rabi_scale)?;
        Ok(Self {
            params,
            probe_rabi,
            density,
            rabi_scale,
            table: None,
        })
    }

    pub fn chi_for(&self, coupling_abs: T) -> Result<Complex<T>, LambdaError> {
        match &self.table {
            Some(table) => table.evaluate(coupling_abs),
            None => {
                let drives = DriveParams::real(self.probe_rabi, coupling_abs);
                probe_susceptibility(&self.params, &drives, self.density).map(|r| r.chi)
            }
        }
    }

    pub fn map(&self, coupling: &ComplexField2D<T>) -> Result<SusceptibilityMap<T>, LambdaError> {
        if self.probe_rabi == T::zero() {
            return Err(LambdaError::ZeroProbe);
        }
        if self.density == T::zero() {
            return Ok(SusceptibilityMap::zeros(coupling.grid));
        }
        let chi = coupling
            .data
            .par_iter()
            .map(|c| self.chi_for(self.rabi_scale * c.norm()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SusceptibilityMap {
            grid: coupling.grid,
            chi,
        })
    }
}

fn validate_scale<T: Real>(rabi_scale: T) -> Result<(), LambdaError> {
    if rabi_scale > T::zero() && rabi_scale.is_finite() {
        Ok(())
    } else {
        Err(LambdaError::InvalidParams(
            "rabi_scale must be positive".into(),
        ))
    }
}

/// χ(x, y) from per-pixel steady-state solves with `G = rabi_scale·|E_c|`
/// and the uniform nominal probe Rabi frequency.
pub fn susceptibility_from_coupling<T: Real>(
    coupling: &ComplexField2D<T>,
    nominal_g: T,
    params: &LambdaParams<T>,
    density: T,
    rabi_scale: T,
) -> Result<SusceptibilityMap<T>, LambdaError> {
    MediumModel::direct(*params, nominal_g, density, rabi_scale)?.map(coupling)
}

/// Provider that diffracts the coupling beam through the cell and derives
/// χ at each requested plane.
///
/// The coupling is propagated from the entrance plane in a single spectral
/// step per plane, so no splitting error accumulates in it.
pub struct CouplingMedium<'a, T: Real> {
    propagator: &'a Propagator<T>,
    model: &'a MediumModel<T>,
    entrance_spectrum: Vec<Complex<T>>,
    current: Option<(usize, SusceptibilityMap<T>)>,
    min_imag: T,
}

impl<'a, T: Real> CouplingMedium<'a, T> {
    pub fn new(
        propagator: &'a Propagator<T>,
        model: &'a MediumModel<T>,
        coupling_at_entrance: &ComplexField2D<T>,
    ) -> Result<Self, OpticsError> {
        Ok(Self {
            propagator,
            model,
            entrance_spectrum: propagator.spectrum(coupling_at_entrance)?,
            current: None,
            min_imag: T::infinity(),
        })
    }

    /// Coupling field `z` past the entrance.
    pub fn coupling_at(&self, z: T) -> ComplexField2D<T> {
        self.propagator.from_spectrum(&self.entrance_spectrum, z)
    }

    /// Smallest Im χ over every plane served so far.
    pub fn min_imag(&self) -> T {
        self.min_imag
    }
}

impl<T: Real> SusceptibilityProvider<T> for CouplingMedium<'_, T> {
    fn chi_at(&mut self, index: usize, z: T) -> Result<&SusceptibilityMap<T>, OpticsError> {
        let cached = matches!(&self.current, Some((i, _)) if *i == index);
        if !cached {
            let coupling = self.coupling_at(z);
            let map = self
                .model
                .map(&coupling)
                .map_err(|e| OpticsError::Provider(Box::new(e)))?;
            self.min_imag = self.min_imag.min(map.min_imag());
            self.current = Some((index, map));
        }
        Ok(&self.current.as_ref().expect("just stored").1)
    }
}
