//! Linear maps `Φ: M_N → M_d` given by their values on matrix units,
//! `C[i][j] = Φ(E_ij)`, together with Choi matrices and the universal
//! trace-preserving map `Ψ` on Hilbert–Schmidt coordinates.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::spectral::eig_unchecked;
use crate::tensor::kron;

/// An `(N·d) x (N·d)` matrix viewed as an `N x N` array of `d x d` blocks.
///
/// Block `(i, j)` occupies rows `i*d .. (i+1)*d` and columns `j*d .. (j+1)*d`,
/// so the outer index belongs to the input space.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    n_blocks: usize,
    block_dim: usize,
    data: ComplexMatrix,
}

impl BlockMatrix {
    pub fn new(data: ComplexMatrix, n_blocks: usize, block_dim: usize) -> Result<Self> {
        let n = n_blocks * block_dim;
        if n_blocks == 0 || block_dim == 0 || data.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "block matrix with {n_blocks} blocks of size {block_dim} cannot hold {:?}",
                data.shape()
            )));
        }
        Ok(Self {
            n_blocks,
            block_dim,
            data,
        })
    }

    /// Assembles `Σ E_ij ⊗ blocks[i][j]`.
    pub fn from_blocks(blocks: &[Vec<ComplexMatrix>]) -> Result<Self> {
        let n_blocks = blocks.len();
        let block_dim = blocks
            .first()
            .and_then(|r| r.first())
            .map_or(0, ComplexMatrix::rows);
        let mut data = ComplexMatrix::zeros(n_blocks * block_dim, n_blocks * block_dim);
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != n_blocks {
                return Err(Error::DimensionMismatch(format!(
                    "block row {i} has {} blocks, expected {n_blocks}",
                    row.len()
                )));
            }
            for (j, b) in row.iter().enumerate() {
                if b.shape() != (block_dim, block_dim) {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({i}, {j}) is {:?}, expected {block_dim}x{block_dim}",
                        b.shape()
                    )));
                }
                data.set_submatrix(i * block_dim, j * block_dim, b);
            }
        }
        Self::new(data, n_blocks, block_dim)
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn data(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn into_data(self) -> ComplexMatrix {
        self.data
    }

    /// `(<e_i| ⊗ 1) C (|e_j> ⊗ 1)`.
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        let d = self.block_dim;
        self.data.submatrix(i * d, j * d, d, d)
    }

    pub fn blocks(&self) -> Vec<Vec<ComplexMatrix>> {
        (0..self.n_blocks)
            .map(|i| (0..self.n_blocks).map(|j| self.block(i, j)).collect())
            .collect()
    }

    /// Leading principal `n x n` block sub-matrix.
    pub fn leading(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n_blocks {
            return Err(Error::IndexOutOfRange {
                index: n,
                max: self.n_blocks,
            });
        }
        let m = n * self.block_dim;
        Self::new(self.data.submatrix(0, 0, m, m), n, self.block_dim)
    }
}

/// A linear map `M_N → M_d` stored as its entry family `C[i][j] = Φ(E_ij)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    dim_in: usize,
    dim_out: usize,
    entries: Vec<Vec<ComplexMatrix>>,
}

/// Verdict of the Choi positivity test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpVerdict {
    pub verdict: bool,
    pub min_eigenvalue: f64,
}

impl ChannelSpec {
    pub fn new(dim_in: usize, dim_out: usize, entries: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidDimensions(
                "channel dimensions must be positive".into(),
            ));
        }
        if entries.len() != dim_in || entries.iter().any(|r| r.len() != dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "entry family must be {dim_in}x{dim_in}"
            )));
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.shape() != (dim_out, dim_out) {
                    return Err(Error::DimensionMismatch(format!(
                        "entry ({i}, {j}) is {:?}, expected {dim_out}x{dim_out}",
                        c.shape()
                    )));
                }
            }
        }
        Ok(Self {
            dim_in,
            dim_out,
            entries,
        })
    }

    pub fn from_fn(
        dim_in: usize,
        dim_out: usize,
        mut f: impl FnMut(usize, usize) -> ComplexMatrix,
    ) -> Result<Self> {
        let entries = (0..dim_in)
            .map(|i| (0..dim_in).map(|j| f(i, j)).collect())
            .collect();
        Self::new(dim_in, dim_out, entries)
    }

    /// Recovers the entry family from a full Choi matrix.
    pub fn from_choi(choi: &BlockMatrix) -> Self {
        Self {
            dim_in: choi.n_blocks(),
            dim_out: choi.block_dim(),
            entries: choi.blocks(),
        }
    }

    /// The identity channel on `M_n`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| ComplexMatrix::elementary(n, n, i, j))
    }

    /// The transpose map on `M_n`; positive but not completely positive.
    pub fn transpose(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| ComplexMatrix::elementary(n, n, j, i))
    }

    /// `s ↦ tr(s) · 1/d`.
    pub fn completely_depolarizing(dim_in: usize, dim_out: usize) -> Result<Self> {
        let mixed = ComplexMatrix::identity(dim_out).scale(1.0 / dim_out as f64);
        Self::from_fn(dim_in, dim_out, |i, j| {
            if i == j {
                mixed.clone()
            } else {
                ComplexMatrix::zeros(dim_out, dim_out)
            }
        })
    }

    /// Builds `Φ(s) = Σ_k w_k s w_k*` from Kraus operators of shape `d x N`.
    ///
    /// The boolean reports whether `Σ_k w_k* w_k = 1` within `1e-10`, i.e.
    /// whether the map is trace preserving. It is not enforced.
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<(Self, bool)> {
        let first = kraus.first().ok_or(Error::EmptyKrausList)?;
        let (d, n) = first.shape();
        if let Some((k, w)) = kraus.iter().enumerate().find(|(_, w)| w.shape() != (d, n)) {
            return Err(Error::ShapeMismatch(format!(
                "operator {k} is {:?}, operator 0 is {d}x{n}",
                w.shape()
            )));
        }
        if d == 0 || n == 0 {
            return Err(Error::ShapeMismatch(
                "Kraus operators must be non-empty".into(),
            ));
        }
        // w E_ij w* = (column i of w)(column j of w)*
        let spec = Self::from_fn(n, d, |i, j| {
            let mut c = ComplexMatrix::zeros(d, d);
            for w in kraus {
                for r in 0..d {
                    for s in 0..d {
                        c[(r, s)] += w[(r, i)] * w[(s, j)].conj();
                    }
                }
            }
            c
        })?;
        let mut gram = ComplexMatrix::zeros(n, n);
        for w in kraus {
            gram = gram + &w.adjoint() * w;
        }
        let tp = (&gram - &ComplexMatrix::identity(n)).norm() <= 1e-10;
        Ok((spec, tp))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// `Φ(E_ij)`, 0-based.
    pub fn entry(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<ComplexMatrix>] {
        &self.entries
    }

    /// The channel with every entry multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|c| c.scale(lambda)).collect())
                .collect(),
        }
    }

    /// Choi matrix over the first `n` basis vectors, `Σ_{i,j<n} E_ij ⊗ C_ij`.
    pub fn choi_matrix(&self, n: usize) -> Result<BlockMatrix> {
        if n == 0 || n > self.dim_in {
            return Err(Error::IndexOutOfRange {
                index: n,
                max: self.dim_in,
            });
        }
        let blocks: Vec<Vec<ComplexMatrix>> = self.entries[..n]
            .iter()
            .map(|row| row[..n].to_vec())
            .collect();
        BlockMatrix::from_blocks(&blocks)
    }

    pub fn full_choi(&self) -> BlockMatrix {
        self.choi_matrix(self.dim_in).expect("dim_in is positive")
    }

    /// Complete positivity via positivity of the full Choi matrix.
    ///
    /// Every principal block sub-matrix of a positive matrix is positive, so
    /// one eigenvalue computation covers all finite index subsets.
    pub fn is_cp(&self, tol: f64) -> Result<CpVerdict> {
        let choi = self.full_choi();
        let eig = eig_unchecked(choi.data())?;
        let min_eigenvalue = eig.min_eigenvalue();
        Ok(CpVerdict {
            verdict: min_eigenvalue >= -tol * choi.data().norm(),
            min_eigenvalue,
        })
    }

    /// `max_{i,j} |tr C_ij - δ_ij|`.
    pub fn tp_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((c.trace() - target).norm());
            }
        }
        worst
    }

    pub fn is_tp(&self, tol: f64) -> bool {
        self.tp_residual() <= tol
    }

    /// `max_{i,j} |C_ji - C_ij*|`, relative to the Choi norm.
    pub fn hermiticity_residual(&self) -> f64 {
        let scale = self.full_choi().data().norm();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.dim_in {
            for j in 0..=i {
                worst = worst.max((&self.entries[j][i] - &self.entries[i][j].adjoint()).norm());
            }
        }
        worst / scale
    }

    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    fn check_input(&self, s: &ComplexMatrix) -> Result<()> {
        if s.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "channel input must be {0}x{0}, got {1:?}",
                self.dim_in,
                s.shape()
            )));
        }
        Ok(())
    }

    /// `Φ(s) = Σ_{i,j} s_ij C_ij`.
    pub fn apply(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(s)?;
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let w = s[(i, j)];
                if w != ZERO {
                    out = out + c.scale_complex(w);
                }
            }
        }
        Ok(out)
    }

    /// `Φ(s) = (|O> ⊗ 1)* (s ⊗ Choi) (|O> ⊗ 1)` with `O = Σ_i e_i ⊗ e_i`.
    ///
    /// Evaluated literally with dense Kronecker products; kept as an
    /// independent route for cross-checking [`ChannelSpec::apply`].
    pub fn apply_via_choi(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(s)?;
        let (n, d) = (self.dim_in, self.dim_out);
        let mut omega = ComplexMatrix::zeros(n * n, 1);
        for i in 0..n {
            omega[(i * n + i, 0)] = ONE;
        }
        let lift = kron(&omega, &ComplexMatrix::identity(d));
        let big = kron(s, self.full_choi().data());
        Ok(&(&lift.adjoint() * &big) * &lift)
    }
}

/// The universal map `Ψ` on operators over `L²(C^N ⊗ C^d, C^d)`.
///
/// Hilbert–Schmidt operators `w` (shape `d x N·d`) are coordinatized by the
/// row-major `vec`, so `rho` has dimension `N·d²` and
/// `Ψ(rho)[a, a'] = Σ_c rho[(a, c), (a', c)]`. On rank-one inputs
/// `Ψ(vec(w1) vec(w2)*) = w1 w2*`.
pub fn apply_universal_psi(rho: &ComplexMatrix, n: usize, d: usize) -> Result<ComplexMatrix> {
    let width = n * d;
    let dim = width * d;
    if rho.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "universal map expects {dim}x{dim}, got {:?}",
            rho.shape()
        )));
    }
    Ok(ComplexMatrix::from_fn(d, d, |a, b| {
        (0..width)
            .map(|c| rho[(a * width + c, b * width + c)])
            .sum::<C64>()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{outer, vec};

    fn e(n: usize, i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::elementary(n, n, i, j)
    }

    fn dephasing() -> ChannelSpec {
        ChannelSpec::from_kraus(&[e(2, 0, 0), e(2, 1, 1)])
            .unwrap()
            .0
    }

    #[test]
    fn kraus_identity() {
        let (ch, tp) = ChannelSpec::from_kraus(&[ComplexMatrix::identity(2)]).unwrap();
        assert!(tp);
        assert_eq!(ch, ChannelSpec::identity(2).unwrap());
    }

    #[test]
    fn kraus_dephasing() {
        let (ch, tp) = ChannelSpec::from_kraus(&[e(2, 0, 0), e(2, 1, 1)]).unwrap();
        assert!(tp);
        assert_eq!(ch.entry(0, 0), &e(2, 0, 0));
        assert_eq!(ch.entry(1, 1), &e(2, 1, 1));
        assert_eq!(ch.entry(0, 1), &ComplexMatrix::zeros(2, 2));
        assert_eq!(ch.entry(1, 0), &ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn kraus_errors_and_tp_flag() {
        let (_, tp) = ChannelSpec::from_kraus(&[ComplexMatrix::identity(2).scale(0.5)]).unwrap();
        assert!(!tp);
        assert!(matches!(
            ChannelSpec::from_kraus(&[]),
            Err(Error::EmptyKrausList)
        ));
        let bad = [ComplexMatrix::identity(2), ComplexMatrix::zeros(3, 2)];
        assert!(matches!(
            ChannelSpec::from_kraus(&bad),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn choi_of_identity_is_bell_projector() {
        let choi = ChannelSpec::identity(2).unwrap().choi_matrix(2).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        for &(r, c) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            expected[(r, c)] = ONE;
        }
        assert_eq!(choi.data(), &expected);
    }

    #[test]
    fn choi_of_depolarizing_and_one_block() {
        let ch = ChannelSpec::completely_depolarizing(2, 2).unwrap();
        assert_eq!(
            ch.full_choi().data(),
            &ComplexMatrix::from_real_diagonal(&[0.5; 4])
        );
        let one = ch.choi_matrix(1).unwrap();
        assert_eq!(one.data(), ch.entry(0, 0));
        assert!(matches!(
            ch.choi_matrix(3),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(ch.choi_matrix(0).is_err());
    }

    #[test]
    fn block_reassembly() {
        let m = ComplexMatrix::from_fn(6, 6, |r, c| C64::new(r as f64, -(c as f64)));
        let b = BlockMatrix::new(m.clone(), 3, 2).unwrap();
        assert_eq!(BlockMatrix::from_blocks(&b.blocks()).unwrap().data(), &m);
        assert!(BlockMatrix::new(m, 4, 2).is_err());
    }

    #[test]
    fn cp_verdicts() {
        let id = ChannelSpec::identity(2).unwrap().is_cp(1e-10).unwrap();
        assert!(id.verdict);
        assert!(id.min_eigenvalue.abs() < 1e-14);

        let t = ChannelSpec::transpose(2).unwrap().is_cp(1e-10).unwrap();
        assert!(!t.verdict);
        assert!((t.min_eigenvalue + 1.0).abs() < 1e-12);

        let dep = ChannelSpec::completely_depolarizing(2, 2)
            .unwrap()
            .is_cp(1e-10)
            .unwrap();
        assert!(dep.verdict);
        assert!((dep.min_eigenvalue - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tp_verdicts() {
        assert!(ChannelSpec::identity(2).unwrap().is_tp(1e-10));
        assert!(!ChannelSpec::identity(2).unwrap().scaled(0.5).is_tp(1e-10));
        assert!(ChannelSpec::completely_depolarizing(2, 2)
            .unwrap()
            .is_tp(1e-10));
    }

    #[test]
    fn hermiticity_preservation() {
        assert!(ChannelSpec::transpose(3)
            .unwrap()
            .is_hermiticity_preserving(1e-10));
        let skew = ChannelSpec::from_fn(2, 1, |i, j| {
            ComplexMatrix::from_rows(&[vec![C64::new(i as f64, j as f64)]]).unwrap()
        })
        .unwrap();
        assert!(!skew.is_hermiticity_preserving(1e-10));
    }

    #[test]
    fn apply_examples() {
        let s = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(ChannelSpec::identity(2).unwrap().apply(&s).unwrap(), s);

        let rho = ComplexMatrix::from_real_rows(&[vec![0.3, 0.1], vec![0.1, 0.7]]).unwrap();
        let out = ChannelSpec::completely_depolarizing(2, 2)
            .unwrap()
            .apply(&rho)
            .unwrap();
        assert!((&out - &ComplexMatrix::identity(2).scale(0.5)).norm() < 1e-15);

        let s = ComplexMatrix::from_rows(&[
            vec![C64::new(0.2, 0.0), C64::new(1.0, 2.0)],
            vec![C64::new(-3.0, 0.5), C64::new(0.8, 0.0)],
        ])
        .unwrap();
        let out = dephasing().apply(&s).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.2, 0.8]);
        assert_eq!(out, expected);
        assert!(dephasing().apply(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn apply_via_choi_matches() {
        let e12 = e(2, 0, 1);
        assert_eq!(
            ChannelSpec::identity(2)
                .unwrap()
                .apply_via_choi(&e12)
                .unwrap(),
            e12
        );

        let s = ComplexMatrix::from_rows(&[
            vec![C64::new(0.2, 0.0), C64::new(1.0, 2.0)],
            vec![C64::new(-3.0, 0.5), C64::new(0.8, 0.0)],
        ])
        .unwrap();
        let a = dephasing().apply(&s).unwrap();
        let b = dephasing().apply_via_choi(&s).unwrap();
        assert!((&a - &b).norm() <= 1e-11 * a.norm());

        let rho = ComplexMatrix::from_real_rows(&[vec![0.6, 0.2], vec![0.2, 0.4]]).unwrap();
        let single = ChannelSpec::new(1, 2, vec![vec![rho.clone()]]).unwrap();
        let two = ComplexMatrix::from_real_rows(&[vec![2.0]]).unwrap();
        assert_eq!(single.apply_via_choi(&two).unwrap(), rho.scale(2.0));
    }

    #[test]
    fn psi_rank_one_example() {
        // w = <e1| ⊗ E11 as a 2x4 operator
        let mut w = ComplexMatrix::zeros(2, 4);
        w[(0, 0)] = ONE;
        let rho = outer(&vec(&w), &vec(&w));
        assert_eq!(apply_universal_psi(&rho, 2, 2).unwrap(), e(2, 0, 0));
    }

    #[test]
    fn psi_of_identity_and_zero() {
        // Σ_c over N·d = 4 columns of δ_aa'
        let out = apply_universal_psi(&ComplexMatrix::identity(8), 2, 2).unwrap();
        assert_eq!(out, ComplexMatrix::identity(2).scale(4.0));
        let z = apply_universal_psi(&ComplexMatrix::zeros(8, 8), 2, 2).unwrap();
        assert_eq!(z, ComplexMatrix::zeros(2, 2));
        assert!(apply_universal_psi(&ComplexMatrix::zeros(7, 7), 2, 2).is_err());
    }
}
