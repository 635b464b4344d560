//! Bi-partite (block) Cholesky decomposition `C = L̂ D L̂* = L L*` of a
//! positive semidefinite block matrix.
//!
//! Divisions by diagonal blocks are replaced by Moore–Penrose
//! pseudo-inverses, so rank-deficient inputs are handled without pivoting.
//! No reordering is ever done: the factors depend only on the input and
//! the fixed basis order, and the first `n` block rows of the factors of
//! `C` coincide with the factors of its leading `n x n` block sub-matrix.
//! [`CholeskyFactors::extend`] exposes this directly by adding one block
//! row at a time.

// Block recursions read most clearly with explicit (i, j, k) indices.
#![allow(clippy::needless_range_loop)]

use crate::channel::BlockMatrix;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spectral::{eig_unchecked, pinv_from_eig, EigenDecomposition, Tolerances};

/// Factors of a bi-partite Cholesky decomposition, stored row by row.
///
/// Row `i` of each triangular factor holds blocks `0..=i`; blocks above the
/// diagonal are zero and never stored.
#[derive(Clone, Debug)]
pub struct CholeskyFactors {
    block_dim: usize,
    tol: Tolerances,
    scale: f64,
    l_hat: Vec<Vec<ComplexMatrix>>,
    l: Vec<Vec<ComplexMatrix>>,
    r_hat: Vec<Vec<ComplexMatrix>>,
    d: Vec<ComplexMatrix>,
    d_pinv: Vec<ComplexMatrix>,
    d_spectra: Vec<Vec<f64>>,
}

impl CholeskyFactors {
    /// Factors of the empty block matrix; grow them with [`Self::extend`].
    pub fn empty(block_dim: usize, tol: Tolerances) -> Self {
        Self {
            block_dim,
            tol,
            scale: 0.0,
            l_hat: Vec::new(),
            l: Vec::new(),
            r_hat: Vec::new(),
            d: Vec::new(),
            d_pinv: Vec::new(),
            d_spectra: Vec::new(),
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.l.len()
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn zero(&self) -> ComplexMatrix {
        ComplexMatrix::zeros(self.block_dim, self.block_dim)
    }

    fn lower(&self, rows: &[Vec<ComplexMatrix>], i: usize, j: usize) -> ComplexMatrix {
        if j <= i {
            rows[i][j].clone()
        } else {
            self.zero()
        }
    }

    /// Block `L_ij`; zero for `j > i`.
    pub fn l(&self, i: usize, j: usize) -> ComplexMatrix {
        self.lower(&self.l, i, j)
    }

    /// Block `L̂_ij` of the unit lower triangular factor.
    pub fn l_hat(&self, i: usize, j: usize) -> ComplexMatrix {
        self.lower(&self.l_hat, i, j)
    }

    /// Block `R̂_ij` of `L̂⁻¹`.
    pub fn r_hat(&self, i: usize, j: usize) -> ComplexMatrix {
        self.lower(&self.r_hat, i, j)
    }

    /// Stored row `i` of `L`, blocks `0..=i`.
    pub fn l_row(&self, i: usize) -> &[ComplexMatrix] {
        &self.l[i]
    }

    /// Diagonal block `D_ii` after clamping.
    pub fn d(&self, i: usize) -> &ComplexMatrix {
        &self.d[i]
    }

    /// Clamped eigenvalues of `D_ii`, ascending and nonnegative.
    pub fn d_spectrum(&self, i: usize) -> &[f64] {
        &self.d_spectra[i]
    }

    pub fn l_blocks(&self) -> Vec<Vec<ComplexMatrix>> {
        self.full(|i, j| self.l(i, j))
    }

    pub fn l_hat_blocks(&self) -> Vec<Vec<ComplexMatrix>> {
        self.full(|i, j| self.l_hat(i, j))
    }

    pub fn r_hat_blocks(&self) -> Vec<Vec<ComplexMatrix>> {
        self.full(|i, j| self.r_hat(i, j))
    }

    fn full(&self, f: impl Fn(usize, usize) -> ComplexMatrix) -> Vec<Vec<ComplexMatrix>> {
        let n = self.n_blocks();
        (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
    }

    /// Appends block row `i = self.n_blocks()`; `row` holds `C_i0, ..., C_ii`.
    ///
    /// One pass of the outer loop: off-diagonal blocks of `L̂` and `L` on
    /// row `i`, then the Schur complement `D_ii` and `L_ii = √D_ii`, then
    /// row `i` of `R̂ = L̂⁻¹`.
    pub fn extend(&mut self, row: &[ComplexMatrix]) -> Result<()> {
        let i = self.n_blocks();
        let d = self.block_dim;
        if row.len() != i + 1 {
            return Err(Error::DimensionMismatch(format!(
                "block row {i} needs {} blocks, got {}",
                i + 1,
                row.len()
            )));
        }
        if let Some(k) = row.iter().position(|c| c.shape() != (d, d)) {
            return Err(Error::DimensionMismatch(format!(
                "block ({i}, {k}) is {:?}, expected {d}x{d}",
                row[k].shape()
            )));
        }

        let scale = self.scale.max(row[i].norm());
        let mut l_hat_row = Vec::with_capacity(i + 1);
        let mut l_row = Vec::with_capacity(i + 1);
        for j in 0..i {
            // Σ_{k<i} C_ik R̂_jk* D_jj†; R̂_jk vanishes for k > j
            let mut acc = self.zero();
            for (k, c_ik) in row.iter().enumerate().take(i) {
                if k <= j {
                    acc = acc + c_ik * &self.r_hat[j][k].adjoint();
                }
            }
            let l_hat_ij = &acc * &self.d_pinv[j];
            // for positive C, (L̂ D)_ij = acc lies in the range of D_jj from the right
            let leak = (&acc - &(&l_hat_ij * &self.d[j])).norm();
            if leak > self.tol.schur_tol * scale.max(acc.norm()) {
                return Err(Error::RangeViolation {
                    row: i,
                    col: j,
                    residual: leak,
                });
            }
            l_row.push(&l_hat_ij * &self.l[j][j]);
            l_hat_row.push(l_hat_ij);
        }

        let mut schur = row[i].clone();
        for l_ij in &l_row {
            schur = schur - l_ij * &l_ij.adjoint();
        }

        let eig = eig_unchecked(&schur)?;
        let min = eig.min_eigenvalue();
        if min < -self.tol.schur_tol * scale {
            return Err(Error::NotPsdBlock {
                block: i,
                min_eigenvalue: min,
            });
        }
        let zero_cut = self.tol.rank_cutoff(d) * scale;
        let clamped: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&x| if x <= zero_cut { 0.0 } else { x })
            .collect();
        let eig = EigenDecomposition {
            eigenvalues: clamped,
            eigenvectors: eig.eigenvectors,
        };
        let d_ii = eig.map(|x| x);
        let l_ii = eig.map(f64::sqrt);
        let d_pinv = pinv_from_eig(&eig, 0.0);

        l_hat_row.push(ComplexMatrix::identity(d));
        l_row.push(l_ii);

        let mut r_row = Vec::with_capacity(i + 1);
        for j in 0..i {
            let mut acc = self.zero();
            for k in j..i {
                acc = acc + &l_hat_row[k] * &self.r_hat[k][j];
            }
            r_row.push(-&acc);
        }
        r_row.push(ComplexMatrix::identity(d));

        self.scale = scale;
        self.l_hat.push(l_hat_row);
        self.l.push(l_row);
        self.r_hat.push(r_row);
        self.d.push(d_ii);
        self.d_pinv.push(d_pinv);
        self.d_spectra.push(eig.eigenvalues);
        Ok(())
    }

    /// `L L*` assembled as a block matrix.
    pub fn reconstruct(&self) -> Result<BlockMatrix> {
        let n = self.n_blocks();
        let mut blocks = vec![vec![self.zero(); n]; n];
        for (i, row) in blocks.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                for k in 0..=i.min(j) {
                    *out = &*out + &(&self.l[i][k] * &self.l[j][k].adjoint());
                }
            }
        }
        BlockMatrix::from_blocks(&blocks)
    }

    /// `L̂ D L̂*` assembled as a block matrix.
    pub fn reconstruct_ldl(&self) -> Result<BlockMatrix> {
        let n = self.n_blocks();
        let mut blocks = vec![vec![self.zero(); n]; n];
        for (i, row) in blocks.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                for k in 0..=i.min(j) {
                    let term = &(&self.l_hat[i][k] * &self.d[k]) * &self.l_hat[j][k].adjoint();
                    *out = &*out + &term;
                }
            }
        }
        BlockMatrix::from_blocks(&blocks)
    }
}

/// Bi-partite Cholesky decomposition of the block matrix with entries
/// `entries[i][j]`. Only the lower triangle `j <= i` is read.
pub fn choi_cholesky(entries: &[Vec<ComplexMatrix>], tol: &Tolerances) -> Result<CholeskyFactors> {
    let n = entries.len();
    if n == 0 {
        return Err(Error::InvalidDimensions(
            "at least one block row is required".into(),
        ));
    }
    if let Some(i) = entries.iter().position(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "block row {i} has {} blocks, expected {n}",
            entries[i].len()
        )));
    }
    let d = entries[0][0].rows();
    let mut factors = CholeskyFactors::empty(d, *tol);
    for (i, row) in entries.iter().enumerate() {
        factors.extend(&row[..=i])?;
    }
    Ok(factors)
}

/// Convenience wrapper over [`choi_cholesky`] for an assembled block matrix.
pub fn choi_cholesky_block(c: &BlockMatrix, tol: &Tolerances) -> Result<CholeskyFactors> {
    choi_cholesky(&c.blocks(), tol)
}

/// Blocks of `L̂⁻¹` for a unit lower triangular block matrix `L̂`.
///
/// Row by row, `R̂_ij = -Σ_{j<=k<i} L̂_ik R̂_kj` with `R̂_ii = 1`.
pub fn uni_triangular_inverse(l_hat: &[Vec<ComplexMatrix>]) -> Result<Vec<Vec<ComplexMatrix>>> {
    let n = l_hat.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let d = l_hat[0][0].rows();
    let eye = ComplexMatrix::identity(d);
    let zero = ComplexMatrix::zeros(d, d);
    for (i, row) in l_hat.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "block row {i} has {} blocks",
                row.len()
            )));
        }
        for (j, b) in row.iter().enumerate() {
            if b.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!(
                    "block ({i}, {j}) is {:?}",
                    b.shape()
                )));
            }
            let ok = match j.cmp(&i) {
                std::cmp::Ordering::Equal => *b == eye,
                std::cmp::Ordering::Greater => *b == zero,
                std::cmp::Ordering::Less => true,
            };
            if !ok {
                return Err(Error::NotUniTriangular { row: i, col: j });
            }
        }
    }

    let mut r: Vec<Vec<ComplexMatrix>> = vec![vec![zero.clone(); n]; n];
    for i in 0..n {
        r[i][i] = eye.clone();
        for j in 0..i {
            let mut acc = zero.clone();
            for k in j..i {
                acc = acc + &l_hat[i][k] * &r[k][j];
            }
            r[i][j] = -&acc;
        }
    }
    Ok(r)
}
