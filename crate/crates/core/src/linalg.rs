//! Small dense complex solves backed by nalgebra, with a 1-norm condition
//! estimate so callers can reject near-singular systems.

use nalgebra::DMatrix;

use crate::error::{BmxError, Result};
use crate::hypermatrix_core::{Matrix, C64};

fn to_dmatrix(a: &[C64], rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_row_slice(rows, cols, a)
}

fn norm1(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// 1-norm condition number of a square row-major matrix; infinite when singular.
pub fn condition_1(a: &[C64], n: usize) -> f64 {
    let m = to_dmatrix(a, n, n);
    match m.clone().try_inverse() {
        Some(inv) => norm1(&m) * norm1(&inv),
        None => f64::INFINITY,
    }
}

/// Solves the square system `a·x = b` (row-major `a`) by partial-pivoting LU.
/// Returns the solution and the 1-norm condition estimate, or an error when
/// the estimate exceeds `max_cond`.
pub fn solve_square(a: &[C64], n: usize, b: &[C64], max_cond: f64, context: &str) -> Result<(Vec<C64>, f64)> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let cond = condition_1(a, n);
    if !cond.is_finite() || cond > max_cond {
        return Err(BmxError::SingularSystem { context: context.to_string(), cond });
    }
    let lu = to_dmatrix(a, n, n).lu();
    let rhs = nalgebra::DVector::from_column_slice(b);
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| BmxError::SingularSystem { context: context.to_string(), cond })?;
    Ok((x.iter().copied().collect(), cond))
}

/// Minimum-norm least-squares solution via SVD; singular values below
/// `rel_tol·σ_max` are treated as zero. Also returns the numerical rank.
pub fn least_squares(a: &[C64], rows: usize, cols: usize, b: &[C64], rel_tol: f64) -> (Vec<C64>, usize) {
    let m = to_dmatrix(a, rows, cols);
    let svd = m.svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = (rel_tol * smax).max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let rhs = nalgebra::DVector::from_column_slice(b);
    let x = svd.solve(&rhs, eps).expect("both factors were requested");
    (x.iter().copied().collect(), rank)
}

/// Dense inverse of a square matrix.
pub fn inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.require_square("inverse")?;
    let cond = condition_1(m.data(), n);
    let inv = to_dmatrix(m.data(), n, n)
        .try_inverse()
        .ok_or(BmxError::SingularSystem { context: "matrix inverse".into(), cond })?;
    Ok(Matrix::from_fn(n, n, |i, j| inv[(i, j)]))
}
