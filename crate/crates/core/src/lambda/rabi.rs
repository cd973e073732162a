//! Power-to-Rabi-frequency conversion.
//!
//! For a beam of power P and diameter d the peak field scales as √P/d, so
//! `Ω = K √P / d` with a single constant K fixed from one measured anchor.

use super::{LambdaError, RB_D1_GAMMA};
use crate::scalar::Real;

/// A measured (power, diameter) → Rabi frequency pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiAnchor<T> {
    /// W
    pub power: T,
    /// m
    pub diameter: T,
    /// rad/s
    pub rabi: T,
}

impl<T: Real> RabiAnchor<T> {
    /// 1.4 mW probe of 5 mm diameter at 8.4γ.
    pub fn probe_reference(gamma: T) -> Self {
        Self {
            power: T::lit(1.4e-3),
            diameter: T::lit(5e-3),
            rabi: T::lit(8.4) * gamma,
        }
    }

    /// 1.5 mW coupling of 1.5 mm diameter at 29γ.
    pub fn coupling_reference(gamma: T) -> Self {
        Self {
            power: T::lit(1.5e-3),
            diameter: T::lit(1.5e-3),
            rabi: T::lit(29.0) * gamma,
        }
    }
}

impl RabiAnchor<f64> {
    pub fn probe_reference_rb() -> Self {
        Self::probe_reference(RB_D1_GAMMA)
    }
}

/// The constant K in `Ω = K √P / d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiCalibration<T> {
    pub k: T,
}

impl<T: Real> RabiCalibration<T> {
    pub fn from_anchor(anchor: &RabiAnchor<T>) -> Result<Self, LambdaError> {
        let ok = |v: T| v.is_finite() && v > T::zero();
        if !(ok(anchor.power) && ok(anchor.diameter) && ok(anchor.rabi)) {
            return Err(LambdaError::BadAnchor);
        }
        Ok(Self {
            k: anchor.rabi * anchor.diameter / anchor.power.sqrt(),
        })
    }

    pub fn rabi(&self, power: T, diameter: T) -> Result<T, LambdaError> {
        if !(power >= T::zero()) || !power.is_finite() {
            return Err(LambdaError::InvalidBeam(
                "power must be finite and non-negative".into(),
            ));
        }
        if !(diameter > T::zero()) || !diameter.is_finite() {
            return Err(LambdaError::InvalidBeam("diameter must be positive".into()));
        }
        Ok(self.k * power.sqrt() / diameter)
    }
}

pub fn rabi_from_power<T: Real>(
    power: T,
    diameter: T,
    anchor: &RabiAnchor<T>,
) -> Result<T, LambdaError> {
    RabiCalibration::from_anchor(anchor)?.rabi(power, diameter)
}
