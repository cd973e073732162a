use std::f64::consts::PI;

use num_complex::Complex;

use super::{
    build_liouvillian, steady_state, DensityMatrix3, DriveParams, LambdaError, LambdaParams,
};
use crate::scalar::Real;

/// Probe susceptibility and the stationary state it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityResult<T> {
    /// Dimensionless χ32; Re sets the index change, Im > 0 is absorption.
    pub chi: Complex<T>,
    pub rho: DensityMatrix3<T>,
}

/// `3λ³/(4π²) · γ/2`, the factor turning `N ρ32 / g` into χ.
///
/// With this normalization a weakly probed two-level atom on resonance has
/// `Im χ = 3Nλ³/(4π²)`.
pub fn susceptibility_prefactor<T: Real>(params: &LambdaParams<T>) -> T {
    let lambda = params.wavelength;
    T::lit(3.0 / (4.0 * PI * PI)) * lambda * lambda * lambda * params.gamma * T::lit(0.5)
}

/// χ32 of the probe transition for an atomic number density in m⁻³.
pub fn probe_susceptibility<T: Real>(
    params: &LambdaParams<T>,
    drives: &DriveParams<T>,
    density: T,
) -> Result<SusceptibilityResult<T>, LambdaError> {
    if drives.probe.norm_sqr() == T::zero() {
        return Err(LambdaError::ZeroProbe);
    }
    if !(density >= T::zero()) || !density.is_finite() {
        return Err(LambdaError::InvalidParams(
            "density must be finite and non-negative".into(),
        ));
    }
    let m = build_liouvillian(params, drives)?;
    let rho = steady_state(&m)?;
    let rho_32 = rho.rho[2][1];
    let chi = (rho_32 / drives.probe).scale(susceptibility_prefactor(params) * density);
    Ok(SusceptibilityResult { chi, rho })
}
