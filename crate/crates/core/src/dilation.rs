//! Resolutions, dilation operators and their unitary extension.
//!
//! For a completely positive `Φ: M_N → M_d` the rows of the Cholesky factor
//! `L` of the Choi matrix give Hilbert–Schmidt operators
//! `ζ_n = Σ_{k<=n} <e_k| ⊗ L_nk` (shape `d x N·d`) with `ζ_i ζ_j* = Φ(E_ij)`.
//! The dilation operator `V` sends `e_n` to `vec(ζ_n)`, and
//! `Φ(s) = Ψ(V s V*)` for the universal map `Ψ`.

use crate::channel::{apply_universal_psi, ChannelSpec};
use crate::cholesky::{choi_cholesky, CholeskyFactors};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spectral::{spectral_norm, Tolerances};
use crate::tensor::vec;

/// Threshold on `|V*V - 1|` for calling `V` an isometry.
pub const ISOMETRY_TOL: f64 = 1e-9;
/// Threshold on `σ_max(V) - 1` for calling `V` a contraction.
pub const CONTRACTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Resolution {
    n_blocks: usize,
    dim_out: usize,
    zetas: Vec<ComplexMatrix>,
}

impl Resolution {
    /// Assembles `ζ_n` from row `n` of the factor `L`.
    pub fn from_factors(factors: &CholeskyFactors) -> Self {
        let n = factors.n_blocks();
        let d = factors.block_dim();
        let zetas = (0..n)
            .map(|row| {
                let mut zeta = ComplexMatrix::zeros(d, n * d);
                for (k, l_nk) in factors.l_row(row).iter().enumerate() {
                    zeta.set_submatrix(0, k * d, l_nk);
                }
                zeta
            })
            .collect();
        Self {
            n_blocks: n,
            dim_out: d,
            zetas,
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn zetas(&self) -> &[ComplexMatrix] {
        &self.zetas
    }

    /// `ζ_n` as a `d x N·d` matrix.
    pub fn zeta(&self, n: usize) -> &ComplexMatrix {
        &self.zetas[n]
    }

    /// `max_{i,j} |ζ_i ζ_j* - C_ij|`.
    pub fn separation_residual(&self, ch: &ChannelSpec) -> f64 {
        let mut worst = 0.0f64;
        for (i, zi) in self.zetas.iter().enumerate() {
            for (j, zj) in self.zetas.iter().enumerate() {
                worst = worst.max((&(zi * &zj.adjoint()) - ch.entry(i, j)).norm());
            }
        }
        worst
    }
}

/// Runs the block Cholesky decomposition on the entries of `ch` and
/// assembles its resolution.
pub fn resolution(ch: &ChannelSpec, tol: &Tolerances) -> Result<Resolution> {
    Ok(Resolution::from_factors(&factorize(ch, tol)?))
}

/// [`choi_cholesky`] on the entry family of `ch`, reporting a failed Schur
/// complement as a complete-positivity failure.
pub fn factorize(ch: &ChannelSpec, tol: &Tolerances) -> Result<CholeskyFactors> {
    choi_cholesky(ch.entries(), tol).map_err(|e| match e {
        e @ (Error::NotPsdBlock { .. } | Error::RangeViolation { .. }) => {
            Error::NotCp(e.to_string())
        }
        other => other,
    })
}

/// The matrix `V` of shape `N·d² x N` whose column `n` is `vec(ζ_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DilationOperator {
    pub v: ComplexMatrix,
    pub dim_in: usize,
    pub dim_out: usize,
    /// Frobenius norm of `V*V - 1`.
    pub isometry_residual: f64,
    pub sigma_max: f64,
    pub is_isometry: bool,
    pub is_contraction: bool,
}

impl DilationOperator {
    /// Wraps an arbitrary `N·d² x N` matrix and measures its flags.
    pub fn from_matrix(v: ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        let rows = dim_in * dim_out * dim_out;
        if v.shape() != (rows, dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "dilation operator must be {rows}x{dim_in}, got {:?}",
                v.shape()
            )));
        }
        let gram = &v.adjoint() * &v;
        let isometry_residual = (&gram - &ComplexMatrix::identity(dim_in)).norm();
        let sigma_max = spectral_norm(&v)?;
        Ok(Self {
            v,
            dim_in,
            dim_out,
            isometry_residual,
            sigma_max,
            is_isometry: isometry_residual <= ISOMETRY_TOL,
            is_contraction: sigma_max <= 1.0 + CONTRACTION_TOL,
        })
    }

    /// `V s V*`, an operator on the Hilbert–Schmidt coordinate space.
    pub fn conjugate(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        if s.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "input must be {0}x{0}, got {1:?}",
                self.dim_in,
                s.shape()
            )));
        }
        Ok(&(&self.v * s) * &self.v.adjoint())
    }
}

pub fn dilation_operator(res: &Resolution, ch: &ChannelSpec) -> Result<DilationOperator> {
    let (n, d) = (ch.dim_in(), ch.dim_out());
    if res.n_blocks() != n || res.dim_out() != d {
        return Err(Error::DimensionMismatch(format!(
            "resolution is for {}x{} blocks, channel is {n} -> {d}",
            res.n_blocks(),
            res.dim_out()
        )));
    }
    let mut v = ComplexMatrix::zeros(n * d * d, n);
    for (col, zeta) in res.zetas().iter().enumerate() {
        v.set_submatrix(0, col, &vec(zeta));
    }
    DilationOperator::from_matrix(v, n, d)
}

/// `Ψ(V s V*)`.
pub fn reconstruct_channel(v: &DilationOperator, s: &ComplexMatrix) -> Result<ComplexMatrix> {
    apply_universal_psi(&v.conjugate(s)?, v.dim_in, v.dim_out)
}

/// The unitary `[[V, 1 - V V*], [0, V*]]` extending an isometry `V`.
///
/// Columns are indexed by `C^N ⊕ H` and rows by `H ⊕ C^N`, where `H` is the
/// `N·d²`-dimensional Hilbert–Schmidt coordinate space.
#[derive(Clone, Debug, PartialEq)]
pub struct HalmosUnitary {
    pub u: ComplexMatrix,
    pub dim_in: usize,
    pub hs_dim: usize,
    /// `max(|U*U - 1|, |UU* - 1|)`.
    pub unitarity_residual: f64,
}

impl HalmosUnitary {
    /// Top-left `H` block of `U ι(s) U*` with `ι(s) = s ⊕ 0`.
    pub fn embedded_dilation(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim_in;
        if s.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("input must be {n}x{n}")));
        }
        let total = n + self.hs_dim;
        let mut embedded = ComplexMatrix::zeros(total, total);
        embedded.set_submatrix(0, 0, s);
        let full = &(&self.u * &embedded) * &self.u.adjoint();
        Ok(full.submatrix(0, 0, self.hs_dim, self.hs_dim))
    }
}

/// Unitarity threshold checked before a [`HalmosUnitary`] is returned.
pub const UNITARITY_TOL: f64 = 1e-9;

pub fn halmos_unitary(v: &DilationOperator) -> Result<HalmosUnitary> {
    if !v.is_isometry {
        return Err(Error::NotIsometry {
            residual: v.isometry_residual,
        });
    }
    let n = v.dim_in;
    let h = v.v.rows();
    let total = n + h;
    let mut u = ComplexMatrix::zeros(total, total);
    u.set_submatrix(0, 0, &v.v);
    let defect = &ComplexMatrix::identity(h) - &(&v.v * &v.v.adjoint());
    u.set_submatrix(0, n, &defect);
    u.set_submatrix(h, n, &v.v.adjoint());

    let eye = ComplexMatrix::identity(total);
    let left = (&(&u.adjoint() * &u) - &eye).norm();
    let right = (&(&u * &u.adjoint()) - &eye).norm();
    let unitarity_residual = left.max(right);
    if unitarity_residual > UNITARITY_TOL {
        return Err(Error::UnitarityFailure {
            residual: unitarity_residual,
        });
    }
    Ok(HalmosUnitary {
        u,
        dim_in: n,
        hs_dim: h,
        unitarity_residual,
    })
}

/// Resolution and dilation operator of `ch` in one call.
pub fn dilate(ch: &ChannelSpec, tol: &Tolerances) -> Result<(Resolution, DilationOperator)> {
    let res = resolution(ch, tol)?;
    let v = dilation_operator(&res, ch)?;
    Ok((res, v))
}

/// Closed-form resolution of `Ad_V` for an isometry `V` of shape `d x N`:
/// `ζ_n = <e_1| ⊗ V E_n1 V*`. Computed without the factorization.
pub fn adjoint_reference(v_iso: &ComplexMatrix) -> Result<Resolution> {
    let (d, n) = v_iso.shape();
    let residual = (&(&v_iso.adjoint() * v_iso) - &ComplexMatrix::identity(n)).norm();
    if residual > 1e-10 {
        return Err(Error::NotIsometry { residual });
    }
    let zetas = (0..n)
        .map(|row| {
            let block = &(v_iso * &ComplexMatrix::elementary(n, n, row, 0)) * &v_iso.adjoint();
            let mut zeta = ComplexMatrix::zeros(d, n * d);
            zeta.set_submatrix(0, 0, &block);
            zeta
        })
        .collect();
    Ok(Resolution {
        n_blocks: n,
        dim_out: d,
        zetas,
    })
}
