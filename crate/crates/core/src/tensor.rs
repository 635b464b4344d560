//! Tensor products, partial traces and the row-major vectorization used to
//! coordinatize Hilbert–Schmidt operators.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Kronecker product; block `(r, c)` of the result is `a[r, c] * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of an operator on `C^dim_a ⊗ C^dim_b`, keeping one factor.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Keep,
) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if m.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "partial trace expects {n}x{n}, got {:?}",
            m.shape()
        )));
    }
    let out = match keep {
        Keep::First => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Keep::Second => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    };
    Ok(out)
}

/// Stacks the rows of `m` into a column: position `a * cols + c` holds `m[a, c]`.
pub fn vec(m: &ComplexMatrix) -> ComplexMatrix {
    let cols = m.cols();
    ComplexMatrix::from_fn(m.rows() * cols, 1, |p, _| m[(p / cols, p % cols)])
}

/// Inverse of [`vec`].
pub fn unvec(v: &ComplexMatrix, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.shape() != (rows * cols, 1) {
        return Err(Error::DimensionMismatch(format!(
            "cannot unvec a {:?} column into {rows}x{cols}",
            v.shape()
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| {
        v[(r * cols + c, 0)]
    }))
}

/// Outer product `x y*` of two column vectors.
pub fn outer(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(x.rows(), y.rows(), |r, c| x[(r, 0)] * y[(c, 0)].conj())
}
