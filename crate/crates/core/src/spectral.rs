//! Spectral calculus for Hermitian matrices.
//!
//! Every map here symmetrizes its input as `(m + m*)/2` and then applies a
//! real function to the eigenvalues: `U diag(f(λ)) U*`. The results are
//! functions of the operator, so they do not depend on which orthonormal
//! basis the eigensolver picks inside a degenerate eigenspace.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// Numerical cutoffs shared by the spectral maps and the factorization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Maximum relative anti-Hermitian part `|m - m*| / |m|`.
    pub herm_tol: f64,
    /// Eigenvalues in `[-psd_tol * |m|, 0)` are clamped to zero.
    pub psd_tol: f64,
    /// Relative rank cutoff for pseudo-inverses, against `λ_max`.
    /// `None` means `dim * 1e-12`.
    pub rank_tol: Option<f64>,
    /// Negativity allowed in a Schur complement block before the input is
    /// declared not positive semidefinite, relative to the block scale.
    pub schur_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm_tol: 1e-10,
            psd_tol: 1e-10,
            rank_tol: None,
            schur_tol: 1e-8,
        }
    }
}

impl Tolerances {
    /// Rank cutoff for a matrix of dimension `dim`.
    pub fn rank_cutoff(&self, dim: usize) -> f64 {
        self.rank_tol.unwrap_or(dim as f64 * 1e-12)
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U diag(f(λ)) U*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let u = self.eigenvectors.inner();
        let n = u.nrows();
        let mut scaled = u.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let g = f(lambda);
            scaled.column_mut(k).scale_mut(g);
        }
        let out = if n == 0 {
            DMatrix::zeros(0, 0)
        } else {
            scaled * u.adjoint()
        };
        ComplexMatrix::from_inner(out)
    }
}

fn check_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    m.ensure_square()?;
    let residual = m.hermiticity_residual();
    if residual > tol.herm_tol {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part of `m`.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    check_hermitian(m, tol)?;
    eig_unchecked(m)
}

/// Skips the Hermiticity check; the input is still symmetrized.
pub(crate) fn eig_unchecked(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = m.rows();
    let sym = m.hermitian_part().into_inner();
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 1000 * n.max(1))
        .ok_or(Error::NumericalFailure)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure);
    }
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_inner(vectors),
    })
}

fn psd_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    let eig = hermitian_eig(m, tol)?;
    let min = eig.min_eigenvalue();
    if min < -tol.psd_tol * m.norm() {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig)
}

/// The positive semidefinite square root, with small negative eigenvalues clamped.
pub fn psd_sqrt(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = psd_eig(m, tol)?;
    Ok(eig.map(|l| l.max(0.0).sqrt()))
}

/// Moore–Penrose pseudo-inverse of a positive semidefinite matrix.
///
/// Eigenvalues at or below `rank_cutoff(dim) * λ_max` are treated as zero,
/// so the zero matrix maps to itself.
pub fn pinv_psd(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = psd_eig(m, tol)?;
    let cutoff = tol.rank_cutoff(m.rows()) * eig.max_eigenvalue();
    Ok(pinv_from_eig(&eig, cutoff))
}

pub(crate) fn pinv_from_eig(eig: &EigenDecomposition, cutoff: f64) -> ComplexMatrix {
    eig.map(|l| if l > cutoff && l > 0.0 { 1.0 / l } else { 0.0 })
}

/// `h_n(m)` with `h_n(t) = t / (t² + 2⁻ⁿ)`; converges to `pinv_psd(m)` as `n` grows.
pub fn pinv_approximant(m: &ComplexMatrix, n: u32, tol: &Tolerances) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimensions(
            "approximant order must be at least 1".into(),
        ));
    }
    let eig = hermitian_eig(m, tol)?;
    let eps = 0.5f64.powi(n as i32);
    Ok(eig.map(|t| t / (t * t + eps)))
}

/// Spectral norm of an arbitrary matrix, `sqrt(λ_max(m* m))`.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    let gram = &m.adjoint() * m;
    Ok(eig_unchecked(&gram)?.max_eigenvalue().max(0.0).sqrt())
}

/// `<η, m ξ>` with the inner product conjugate-linear in the first slot.
pub fn inner_product(eta: &[C64], m: &ComplexMatrix, xi: &[C64]) -> C64 {
    let v = m * &ComplexMatrix::column(xi);
    eta.iter()
        .zip(0..v.rows())
        .map(|(e, r)| e.conj() * v[(r, 0)])
        .sum()
}
