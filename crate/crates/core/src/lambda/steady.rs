//! Stationary state of the master equation.

use super::linalg;
use super::{DensityMatrix3, LambdaError, Liouvillian, VEC_DIM};
use crate::scalar::Real;

/// Solves `M ρ = 0` with `Tr ρ = 1`.
///
/// The population equation of `|1⟩` is replaced by the trace constraint and
/// the resulting 9×9 system is solved directly. A rank estimate of `M` with
/// complete pivoting rejects generators whose stationary manifold is more
/// than one-dimensional.
pub fn steady_state<T: Real>(m: &Liouvillian<T>) -> Result<DensityMatrix3<T>, LambdaError> {
    let scale = m.scale();
    if scale == T::zero() {
        return Err(LambdaError::DegenerateSteadyState { nullity: VEC_DIM });
    }
    let tol = scale * T::epsilon() * T::lit(64.0 * VEC_DIM as f64);
    let rank = linalg::rank(m.matrix, tol);
    if rank < VEC_DIM - 1 {
        return Err(LambdaError::DegenerateSteadyState {
            nullity: VEC_DIM - rank,
        });
    }

    let mut a = m.matrix;
    let mut b = [T::zero(); VEC_DIM];
    a[0] = [T::zero(); VEC_DIM];
    a[0][0] = T::one();
    a[0][1] = T::one();
    a[0][2] = T::one();
    b[0] = T::one();
    let x = linalg::solve(a, b).ok_or(LambdaError::DegenerateSteadyState { nullity: 2 })?;
    Ok(DensityMatrix3::from_vector(&x))
}
