//! Three-level Λ system driven by a probe and a coupling field.
//!
//! Level labels follow the usual CPT layout: `|1⟩` and `|2⟩` are ground
//! states, `|3⟩` is the excited state. The coupling field drives
//! `|1⟩ ↔ |3⟩` with detuning Δ1 and the probe drives `|2⟩ ↔ |3⟩` with
//! detuning Δ2. All rates and detunings are angular frequencies (rad/s).
//!
//! The interaction Hamiltonian in the rotating frame is
//!
//! ```text
//! H = Δ1|1⟩⟨1| + Δ2|2⟩⟨2| − (G|3⟩⟨1| + g|3⟩⟨2| + h.c.)
//! ```
//!
//! so `g` and `G` enter without a factor of one half.

mod linalg;
mod liouvillian;
mod rabi;
mod steady;
mod susceptibility;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

pub use liouvillian::{build_liouvillian, Liouvillian, VEC_DIM};
pub use rabi::{rabi_from_power, RabiAnchor, RabiCalibration};
pub use steady::steady_state;
pub use susceptibility::{probe_susceptibility, susceptibility_prefactor, SusceptibilityResult};

/// Natural linewidth of the Rb D1 line, 2π × 5.75 MHz.
pub const RB_D1_GAMMA: f64 = 2.0 * std::f64::consts::PI * 5.75e6;

/// Rb D1 wavelength in metres.
pub const RB_D1_WAVELENGTH: f64 = 795e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LambdaError {
    #[error("invalid Λ-system parameters: {0}")]
    InvalidParams(String),
    #[error("steady state is not unique (nullspace dimension {nullity})")]
    DegenerateSteadyState { nullity: usize },
    #[error("probe Rabi frequency is zero; susceptibility per unit probe field is undefined")]
    ZeroProbe,
    #[error("Rabi calibration anchor must have positive power, diameter and Rabi frequency")]
    BadAnchor,
    #[error("invalid beam input: {0}")]
    InvalidBeam(String),
}

/// Atomic constants of the Λ system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaParams<T> {
    /// Total decay rate of `|3⟩`.
    pub gamma: T,
    /// Fraction of `|3⟩` decay that ends in `|1⟩`.
    pub branch_1: T,
    /// Fraction of `|3⟩` decay that ends in `|2⟩`.
    pub branch_2: T,
    /// Ground-state coherence decay rate acting on ρ12.
    pub gamma_12: T,
    /// Coupling detuning Δ1.
    pub delta_1: T,
    /// Probe detuning Δ2.
    pub delta_2: T,
    /// Probe wavelength, used to scale the susceptibility.
    pub wavelength: T,
}

impl<T: Real> LambdaParams<T> {
    /// Rb D1 constants with equal branching, no ground decoherence and the
    /// given detunings.
    pub fn rb_d1(delta_1: T, delta_2: T) -> Self {
        Self {
            gamma: T::lit(RB_D1_GAMMA),
            branch_1: T::lit(0.5),
            branch_2: T::lit(0.5),
            gamma_12: T::zero(),
            delta_1,
            delta_2,
            wavelength: T::lit(RB_D1_WAVELENGTH),
        }
    }

    /// The experimental operating point: Δ1 = 2π·361 MHz, Δ2 = 2π·375 MHz.
    pub fn experiment() -> Self {
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        Self::rb_d1(two_pi * T::lit(361e6), two_pi * T::lit(375e6))
    }

    pub fn validate(&self) -> Result<(), LambdaError> {
        let all = [
            self.gamma,
            self.branch_1,
            self.branch_2,
            self.gamma_12,
            self.delta_1,
            self.delta_2,
            self.wavelength,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(LambdaError::InvalidParams("non-finite value".into()));
        }
        if self.gamma <= T::zero() {
            return Err(LambdaError::InvalidParams("gamma must be positive".into()));
        }
        if self.branch_1 < T::zero() || self.branch_2 < T::zero() {
            return Err(LambdaError::InvalidParams(
                "branching fractions must be non-negative".into(),
            ));
        }
        if (self.branch_1 + self.branch_2 - T::one()).abs() > T::lit(1e-9) {
            return Err(LambdaError::InvalidParams(
                "branching fractions must sum to one".into(),
            ));
        }
        if self.gamma_12 < T::zero() {
            return Err(LambdaError::InvalidParams(
                "gamma_12 must be non-negative".into(),
            ));
        }
        if self.wavelength <= T::zero() {
            return Err(LambdaError::InvalidParams(
                "wavelength must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Complex Rabi frequencies of the two drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams<T> {
    /// Probe Rabi frequency g on `|2⟩ ↔ |3⟩`.
    pub probe: Complex<T>,
    /// Coupling Rabi frequency G on `|1⟩ ↔ |3⟩`.
    pub coupling: Complex<T>,
}

impl<T: Real> DriveParams<T> {
    pub fn real(probe: T, coupling: T) -> Self {
        Self {
            probe: Complex::new(probe, T::zero()),
            coupling: Complex::new(coupling, T::zero()),
        }
    }

    pub fn validate(&self) -> Result<(), LambdaError> {
        let finite = |c: Complex<T>| c.re.is_finite() && c.im.is_finite();
        if finite(self.probe) && finite(self.coupling) {
            Ok(())
        } else {
            Err(LambdaError::InvalidParams(
                "non-finite Rabi frequency".into(),
            ))
        }
    }
}

/// Density matrix of the Λ system, indices over {|1⟩, |2⟩, |3⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3<T> {
    pub rho: [[Complex<T>; 3]; 3],
}

impl<T: Real> DensityMatrix3<T> {
    /// Pure population in level `level` (0-based).
    pub fn population_in(level: usize) -> Self {
        let mut rho = [[Complex::new(T::zero(), T::zero()); 3]; 3];
        rho[level][level] = Complex::new(T::one(), T::zero());
        Self { rho }
    }

    /// Builds the Hermitian matrix described by a real 9-vector.
    pub fn from_vector(v: &[T; VEC_DIM]) -> Self {
        Self {
            rho: liouvillian::unvectorize(v),
        }
    }

    pub fn to_vector(&self) -> [T; VEC_DIM] {
        liouvillian::vectorize(&self.rho)
    }

    /// Population of level `i` (0-based).
    pub fn population(&self, i: usize) -> T {
        self.rho[i][i].re
    }

    pub fn trace(&self) -> Complex<T> {
        self.rho[0][0] + self.rho[1][1] + self.rho[2][2]
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Checks positive semidefiniteness through the principal minors.
    pub fn is_positive_semidefinite(&self, tol: T) -> bool {
        let r = &self.rho;
        let diag_ok = (0..3).all(|i| r[i][i].re >= -tol);
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let minors_ok = pairs
            .iter()
            .all(|&(i, j)| r[i][i].re * r[j][j].re - r[i][j].norm_sqr() >= -tol);
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        diag_ok && minors_ok && det.re >= -tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.rho[i][j] - other.rho[i][j]).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests;
