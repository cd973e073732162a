//! Dense elimination on small fixed-size systems.

use crate::scalar::Real;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes.
pub(crate) fn solve<T: Real, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> Option<[T; N]> {
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col] == T::zero() || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            if factor == T::zero() {
                continue;
            }
            for k in col..N {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = [T::zero(); N];
    for row in (0..N).rev() {
        let tail = (row + 1..N).fold(T::zero(), |acc, k| acc + a[row][k] * x[k]);
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Numerical rank by Gaussian elimination with complete pivoting; pivots
/// below `tol` count as zero.
pub(crate) fn rank<T: Real, const N: usize>(mut a: [[T; N]; N], tol: T) -> usize {
    let mut rank = 0;
    for step in 0..N {
        let mut best = (step, step);
        let mut best_val = T::zero();
        for i in step..N {
            for j in step..N {
                if a[i][j].abs() > best_val {
                    best_val = a[i][j].abs();
                    best = (i, j);
                }
            }
        }
        if best_val <= tol {
            break;
        }
        a.swap(step, best.0);
        for row in a.iter_mut() {
            row.swap(step, best.1);
        }
        for i in step + 1..N {
            let factor = a[i][step] / a[step][step];
            for j in step..N {
                a[i][j] = a[i][j] - factor * a[step][j];
            }
        }
        rank += 1;
    }
    rank
}
