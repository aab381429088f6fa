//! Dense Gaussian elimination with partial pivoting for tiny fixed-size systems.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct Solution<T, const N: usize> {
    pub x: [T; N],
    /// `max |pivot| / min |pivot|`, a cheap conditioning estimate.
    pub pivot_ratio: T,
}

/// Solves `a · x = b`. Returns `None` only when a pivot is exactly zero;
/// ill-conditioning is reported through `pivot_ratio`.
pub fn solve<T: Scalar, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> Option<Solution<T, N>> {
    let mut max_pivot = T::zero();
    let mut min_pivot = T::infinity();

    for col in 0..N {
        let pivot_row = (col..N)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(col);
        if a[pivot_row][col] == T::zero() || !a[pivot_row][col].is_finite() {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);

        let pivot = a[col][col];
        max_pivot = max_pivot.max(pivot.abs());
        min_pivot = min_pivot.min(pivot.abs());

        for row in col + 1..N {
            let factor = a[row][col] / pivot;
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
        let mut acc = b[row];
        for k in row + 1..N {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }

    Some(Solution { x, pivot_ratio: max_pivot / min_pivot })
}

/// Infinity norm of `a · x - b`.
pub fn residual_norm<T: Scalar, const N: usize>(a: &[[T; N]; N], x: &[T; N], b: &[T; N]) -> T {
    let mut worst = T::zero();
    for (row, rhs) in a.iter().zip(b) {
        let lhs: T = row.iter().zip(x).map(|(&m, &v)| m * v).sum();
        worst = worst.max((lhs - *rhs).abs());
    }
    worst
}
