//! Coherent-population-trapping image cloning in an atomic vapor.
//!
//! The crate is organised bottom-up:
//!
//! * [`lambda`]: stationary density matrix of a driven Λ system and the
//!   probe susceptibility χ32 it produces.
//! * [`optics`]: sampled transverse fields, paraxial angular-spectrum
//!   propagation and the symmetric split-step solver.
//! * [`scene`]: beams, masks and the susceptibility map induced by a
//!   structured coupling beam.
//! * [`metrics`]: similarity, fringe visibility, edge sharpness and power
//!   accounting on camera-plane images.
//! * [`harness`]: scenario files, sweeps, artifacts and the CLI backend.
//!
//! The numerical core is generic over [`Real`] (`f32`/`f64`); the aliases
//! below fix it to `f64`, which is what the harness uses.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod harness;
pub mod lambda;
pub mod metrics;
pub mod optics;
pub mod pgm;
pub mod scalar;
pub mod scene;

pub use scalar::Real;

pub type LambdaParams = lambda::LambdaParams<f64>;
pub type DriveParams = lambda::DriveParams<f64>;
pub type DensityMatrix3 = lambda::DensityMatrix3<f64>;
pub type SusceptibilityResult = lambda::SusceptibilityResult<f64>;
pub type GridSpec = optics::GridSpec<f64>;
pub type ComplexField2D = optics::ComplexField2D<f64>;
pub type SusceptibilityMap = optics::SusceptibilityMap<f64>;
pub type Mask2D = scene::Mask2D<f64>;
pub type ChiTable = scene::ChiTable<f64>;
pub type IntensityImage = metrics::IntensityImage<f64>;

pub use num_complex::Complex64;
