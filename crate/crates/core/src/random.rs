//! Seeded generators for test matrices and channels.
//!
//! Random CPTP channels come from a Stinespring isometry
//! `W: C^N → C^d ⊗ C^env`, so `Φ(s) = tr_env(W s W*)` is trace preserving
//! by construction rather than by numerical check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// Deterministic sampler; identical seeds give bit-identical output.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn seeded(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Entries with independent real and imaginary parts of variance 1/2.
    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = ComplexMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = C64::new(self.normal() * s, self.normal() * s);
            }
        }
        m
    }

    pub fn gaussian_vector(&mut self, n: usize) -> Vec<C64> {
        let m = self.gaussian_matrix(n, 1);
        (0..n).map(|r| m[(r, 0)]).collect()
    }

    /// Random Hermitian matrix `(G + G*)/2`.
    pub fn hermitian(&mut self, n: usize) -> ComplexMatrix {
        self.gaussian_matrix(n, n).hermitian_part()
    }

    /// Random positive semidefinite matrix `G G*` with `G` of shape `n x rank`.
    pub fn psd(&mut self, n: usize, rank: usize) -> ComplexMatrix {
        let g = self.gaussian_matrix(n, rank);
        &g * &g.adjoint()
    }

    /// Random density matrix of full rank.
    pub fn density(&mut self, n: usize) -> ComplexMatrix {
        let p = self.psd(n, n);
        let t = p.trace().re;
        p.scale(1.0 / t)
    }

    /// Random isometry of shape `rows x cols`, orthonormalizing a Gaussian
    /// matrix by twice-iterated Gram–Schmidt.
    pub fn isometry(&mut self, rows: usize, cols: usize) -> Result<ComplexMatrix> {
        if cols > rows {
            return Err(Error::InvalidDimensions(format!(
                "no isometry from dimension {cols} into dimension {rows}"
            )));
        }
        let mut q = self.gaussian_matrix(rows, cols);
        for c in 0..cols {
            for _ in 0..2 {
                for p in 0..c {
                    let dot: C64 = (0..rows).map(|r| q[(r, p)].conj() * q[(r, c)]).sum();
                    for r in 0..rows {
                        let sub = q[(r, p)] * dot;
                        q[(r, c)] -= sub;
                    }
                }
            }
            let norm = (0..rows).map(|r| q[(r, c)].norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return Err(Error::NumericalFailure);
            }
            for r in 0..rows {
                q[(r, c)] /= norm;
            }
        }
        Ok(q)
    }

    /// Random block positive semidefinite matrix `M M*` as an `N x N` array
    /// of `d x d` blocks, `M` of shape `N·d x rank`.
    pub fn psd_blocks(
        &mut self,
        n_blocks: usize,
        d: usize,
        rank: usize,
    ) -> Vec<Vec<ComplexMatrix>> {
        let full = self.psd(n_blocks * d, rank);
        (0..n_blocks)
            .map(|i| {
                (0..n_blocks)
                    .map(|j| full.submatrix(i * d, j * d, d, d))
                    .collect()
            })
            .collect()
    }

    /// Random CPTP channel `M_N → M_d` with environment dimension `env`,
    /// returned with its Kraus operators `w_k = (1 ⊗ <f_k|) W`.
    pub fn stinespring_channel(
        &mut self,
        dim_in: usize,
        dim_out: usize,
        env: usize,
    ) -> Result<(ChannelSpec, Vec<ComplexMatrix>)> {
        if dim_in == 0 || dim_out == 0 || env == 0 {
            return Err(Error::InvalidDimensions(
                "dimensions must be positive".into(),
            ));
        }
        if dim_in > dim_out * env {
            return Err(Error::InvalidDimensions(format!(
                "dim_in {dim_in} exceeds dim_out * env = {}",
                dim_out * env
            )));
        }
        let w = self.isometry(dim_out * env, dim_in)?;
        let kraus: Vec<ComplexMatrix> = (0..env)
            .map(|k| ComplexMatrix::from_fn(dim_out, dim_in, |a, n| w[(a * env + k, n)]))
            .collect();
        let (ch, _) = ChannelSpec::from_kraus(&kraus)?;
        Ok((ch, kraus))
    }

    /// Random completely positive (generally not trace preserving) channel
    /// from `n_kraus` Gaussian Kraus operators.
    pub fn cp_channel(
        &mut self,
        dim_in: usize,
        dim_out: usize,
        n_kraus: usize,
    ) -> Result<ChannelSpec> {
        let kraus: Vec<ComplexMatrix> = (0..n_kraus)
            .map(|_| self.gaussian_matrix(dim_out, dim_in))
            .collect();
        Ok(ChannelSpec::from_kraus(&kraus)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometry_is_orthonormal() {
        let mut s = Sampler::seeded(3);
        let q = s.isometry(6, 4).unwrap();
        let g = &q.adjoint() * &q;
        assert!((&g - &ComplexMatrix::identity(4)).norm() < 1e-14);
        assert!(s.isometry(2, 3).is_err());
    }

    #[test]
    fn stinespring_is_cptp() {
        let mut s = Sampler::seeded(7);
        let (ch, _) = s.stinespring_channel(2, 2, 2).unwrap();
        assert!(ch.is_tp(1e-10));
        assert!(ch.is_cp(1e-10).unwrap().verdict);
        assert!(s.stinespring_channel(4, 2, 1).is_err());
    }

    #[test]
    fn same_seed_same_stream() {
        let a = Sampler::seeded(11).gaussian_matrix(3, 3);
        let b = Sampler::seeded(11).gaussian_matrix(3, 3);
        assert_eq!(a, b);
        let c = Sampler::seeded(12).gaussian_matrix(3, 3);
        assert_ne!(a, c);
    }

    #[test]
    fn density_has_unit_trace() {
        let rho = Sampler::seeded(1).density(4);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert!(rho.trace().im.abs() < 1e-14);
    }
}
