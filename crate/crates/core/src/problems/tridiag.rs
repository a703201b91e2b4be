//! Thomas algorithm for tridiagonal systems.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `A x = rhs` where `A` has sub-diagonal `lower` (length n-1),
/// diagonal `diag` (length n) and super-diagonal `upper` (length n-1).
///
/// No pivoting; intended for diagonally dominant or SPD systems.
pub fn solve_tridiagonal<T: Scalar>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if lower.len() + 1 != n || upper.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, got: lower.len().min(upper.len()) });
    }

    let mut c = vec![T::zero(); n];
    let mut x = vec![T::zero(); n];
    let mut denom = diag[0];
    if denom == T::zero() {
        return Err(Error::InvalidParameter("singular tridiagonal system".into()));
    }
    if n > 1 {
        c[0] = upper[0] / denom;
    }
    x[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i - 1] * c[i - 1];
        if denom == T::zero() {
            return Err(Error::InvalidParameter("singular tridiagonal system".into()));
        }
        if i + 1 < n {
            c[i] = upper[i] / denom;
        }
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        x[i] = x[i] - c[i] * x[i + 1];
    }
    Ok(x)
}
