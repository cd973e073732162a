//! Real-vectorized master equation generator.

use num_complex::Complex;

use super::{DriveParams, LambdaError, LambdaParams};
use crate::scalar::Real;

/// Length of the real vectorization of a 3×3 Hermitian matrix.
pub const VEC_DIM: usize = 9;

// Vector layout: ρ11, ρ22, ρ33, then (Re, Im) of ρ12, ρ13, ρ23.
const OFF_DIAG: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

type Mat3<T> = [[Complex<T>; 3]; 3];

/// Generator `M` of `dρ/dt = M ρ` acting on the real 9-vector of ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Liouvillian<T> {
    pub matrix: [[T; VEC_DIM]; VEC_DIM],
}

impl<T: Real> Liouvillian<T> {
    pub fn apply(&self, v: &[T; VEC_DIM]) -> [T; VEC_DIM] {
        let mut out = [T::zero(); VEC_DIM];
        for (o, row) in out.iter_mut().zip(self.matrix.iter()) {
            *o = row
                .iter()
                .zip(v.iter())
                .fold(T::zero(), |acc, (&m, &x)| acc + m * x);
        }
        out
    }

    /// Largest absolute matrix element.
    pub fn scale(&self) -> T {
        self.matrix
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |acc, &m| acc.max(m.abs()))
    }
}

pub(crate) fn vectorize<T: Real>(rho: &Mat3<T>) -> [T; VEC_DIM] {
    let mut v = [T::zero(); VEC_DIM];
    for i in 0..3 {
        v[i] = rho[i][i].re;
    }
    for (k, &(i, j)) in OFF_DIAG.iter().enumerate() {
        v[3 + 2 * k] = rho[i][j].re;
        v[4 + 2 * k] = rho[i][j].im;
    }
    v
}

pub(crate) fn unvectorize<T: Real>(v: &[T; VEC_DIM]) -> Mat3<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut rho = [[zero; 3]; 3];
    for i in 0..3 {
        rho[i][i] = Complex::new(v[i], T::zero());
    }
    for (k, &(i, j)) in OFF_DIAG.iter().enumerate() {
        let c = Complex::new(v[3 + 2 * k], v[4 + 2 * k]);
        rho[i][j] = c;
        rho[j][i] = c.conj();
    }
    rho
}

fn matmul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut c = [[zero; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).fold(zero, |acc, k| acc + a[i][k] * b[k][j]);
        }
    }
    c
}

fn adjoint<T: Real>(a: &Mat3<T>) -> Mat3<T> {
    let mut c = *a;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

fn hamiltonian<T: Real>(params: &LambdaParams<T>, drives: &DriveParams<T>) -> Mat3<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut h = [[zero; 3]; 3];
    h[0][0] = Complex::new(params.delta_1, T::zero());
    h[1][1] = Complex::new(params.delta_2, T::zero());
    h[2][0] = -drives.coupling;
    h[0][2] = -drives.coupling.conj();
    h[2][1] = -drives.probe;
    h[1][2] = -drives.probe.conj();
    h
}

/// Right-hand side of the master equation in matrix form.
pub(crate) fn master_rhs<T: Real>(
    params: &LambdaParams<T>,
    drives: &DriveParams<T>,
    rho: &Mat3<T>,
) -> Mat3<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let minus_i = Complex::new(T::zero(), -T::one());
    let h = hamiltonian(params, drives);
    let h_rho = matmul(&h, rho);
    let rho_h = matmul(rho, &h);

    let mut out = [[zero; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = minus_i * (h_rho[i][j] - rho_h[i][j]);
        }
    }

    // Spontaneous emission |3⟩ → |1⟩, |3⟩ → |2⟩.
    let half = T::lit(0.5);
    for (ground, branch) in [(0usize, params.branch_1), (1usize, params.branch_2)] {
        let rate = params.gamma * branch;
        if rate == T::zero() {
            continue;
        }
        let mut jump = [[zero; 3]; 3];
        jump[ground][2] = Complex::new(rate.sqrt(), T::zero());
        let jump_dag = adjoint(&jump);
        let sandwich = matmul(&matmul(&jump, rho), &jump_dag);
        let number = matmul(&jump_dag, &jump);
        let left = matmul(&number, rho);
        let right = matmul(rho, &number);
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = out[i][j] + sandwich[i][j] - (left[i][j] + right[i][j]).scale(half);
            }
        }
    }

    out[0][1] = out[0][1] - rho[0][1].scale(params.gamma_12);
    out[1][0] = out[1][0] - rho[1][0].scale(params.gamma_12);
    out
}

/// Assembles the 9×9 real generator column by column from the matrix-form
/// master equation.
pub fn build_liouvillian<T: Real>(
    params: &LambdaParams<T>,
    drives: &DriveParams<T>,
) -> Result<Liouvillian<T>, LambdaError> {
    params.validate()?;
    drives.validate()?;
    let mut matrix = [[T::zero(); VEC_DIM]; VEC_DIM];
    for col in 0..VEC_DIM {
        let mut basis = [T::zero(); VEC_DIM];
        basis[col] = T::one();
        let rho = unvectorize(&basis);
        let d_rho = vectorize(&master_rhs(params, drives, &rho));
        for (row, value) in d_rho.iter().enumerate() {
            matrix[row][col] = *value;
        }
    }
    Ok(Liouvillian { matrix })
}
