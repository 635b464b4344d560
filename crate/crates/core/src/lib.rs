//! Canonical dilations of completely positive maps between matrix algebras.
//!
//! A linear map `Φ: M_N → M_d` is stored by its values on matrix units,
//! `C_ij = Φ(E_ij)`. Its Choi matrix `Σ E_ij ⊗ C_ij` is factored with a
//! block Cholesky decomposition `C = L L*` that uses pseudo-inverses in
//! place of divisions; row `n` of `L` yields a Hilbert–Schmidt operator
//! `ζ_n` with `ζ_i ζ_j* = C_ij`. Stacking `vec(ζ_n)` as columns gives the
//! dilation operator `V` with `Φ = Ψ ∘ Ad_V`, where `Ψ` is a fixed
//! trace-preserving map independent of `Φ`. When `Φ` is trace preserving,
//! `V` is an isometry and extends to the unitary `[[V, 1 - VV*], [0, V*]]`.
//!
//! ```
//! use choichol::{dilate, reconstruct_channel, ChannelSpec, ComplexMatrix, Tolerances};
//!
//! let ch = ChannelSpec::identity(2).unwrap();
//! let (_, v) = dilate(&ch, &Tolerances::default()).unwrap();
//! assert!(v.is_isometry);
//! let s = ComplexMatrix::elementary(2, 2, 0, 1);
//! let out = reconstruct_channel(&v, &s).unwrap();
//! assert!((&out - &s).norm() < 1e-12);
//! ```

pub mod channel;
pub mod cholesky;
pub mod dilation;
pub mod error;
pub mod exec;
pub mod format;
pub mod matrix;
pub mod random;
pub mod spectral;
pub mod tensor;
pub mod verify;

pub use channel::{apply_universal_psi, BlockMatrix, ChannelSpec, CpVerdict};
pub use cholesky::{choi_cholesky, choi_cholesky_block, uni_triangular_inverse, CholeskyFactors};
pub use dilation::{
    adjoint_reference, dilate, dilation_operator, factorize, halmos_unitary, reconstruct_channel,
    resolution, DilationOperator, HalmosUnitary, Resolution,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use matrix::{ComplexMatrix, C64};
pub use spectral::{
    hermitian_eig, pinv_approximant, pinv_psd, psd_sqrt, spectral_norm, EigenDecomposition,
    Tolerances,
};
pub use tensor::{kron, partial_trace, unvec, vec, Keep};
