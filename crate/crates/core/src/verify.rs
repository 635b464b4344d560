//! End-to-end checks of the dilation pipeline over batches of inputs and
//! ensembles of random channels.

use crate::channel::ChannelSpec;
use crate::dilation::{dilate, halmos_unitary, reconstruct_channel, DilationOperator};
use crate::error::Result;
use crate::exec::Exec;
use crate::matrix::ComplexMatrix;
use crate::random::Sampler;
use crate::spectral::Tolerances;

/// All matrix units `E_ij` of `M_n` followed by `samples` seeded random
/// density matrices.
pub fn test_inputs(n: usize, samples: usize, seed: u64) -> Vec<ComplexMatrix> {
    let mut inputs: Vec<ComplexMatrix> = (0..n * n)
        .map(|p| ComplexMatrix::elementary(n, n, p / n, p % n))
        .collect();
    let mut sampler = Sampler::seeded(seed);
    inputs.extend((0..samples).map(|_| sampler.density(n)));
    inputs
}

/// `max_s |Ψ(V s V*) - Φ(s)|` over `inputs`.
pub fn roundtrip_residual(
    ch: &ChannelSpec,
    v: &DilationOperator,
    inputs: &[ComplexMatrix],
    exec: Exec,
) -> Result<f64> {
    let residuals = exec.map(inputs, |s| -> Result<f64> {
        let via_dilation = reconstruct_channel(v, s)?;
        let direct = ch.apply(s)?;
        Ok((&via_dilation - &direct).norm())
    });
    residuals
        .into_iter()
        .try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

/// Parameters of one random Stinespring channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleCase {
    pub dim_in: usize,
    pub dim_out: usize,
    pub env: usize,
    pub seed: u64,
}

/// Measured residuals for one channel of an ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelCheck {
    pub case: EnsembleCase,
    pub roundtrip: f64,
    pub isometry_residual: f64,
    pub separation: f64,
    pub unitarity_residual: f64,
    /// `max_s |top-left block of U ι(s) U* - V s V*|`.
    pub embedding_residual: f64,
}

/// `count` cases with `N, d ∈ [2, max_dim]` and `env ∈ [1, max_env]`,
/// skipping shapes with no isometry (`N > d·env`).
pub fn ensemble_cases(
    count: usize,
    max_dim: usize,
    max_env: usize,
    seed: u64,
) -> Vec<EnsembleCase> {
    let mut sampler = Sampler::seeded(seed);
    let mut cases = Vec::with_capacity(count);
    while cases.len() < count {
        let dim_in = sampler.index(2, max_dim);
        let dim_out = sampler.index(2, max_dim);
        let env = sampler.index(1, max_env);
        let case_seed = sampler.index(0, u32::MAX as usize) as u64;
        if dim_in <= dim_out * env {
            cases.push(EnsembleCase {
                dim_in,
                dim_out,
                env,
                seed: case_seed,
            });
        }
    }
    cases
}

/// Builds the channel for `case`, dilates it and measures every residual.
pub fn check_case(case: EnsembleCase, samples: usize, tol: &Tolerances) -> Result<ChannelCheck> {
    let mut sampler = Sampler::seeded(case.seed);
    let (ch, _) = sampler.stinespring_channel(case.dim_in, case.dim_out, case.env)?;
    let (res, v) = dilate(&ch, tol)?;
    let inputs = test_inputs(case.dim_in, samples, case.seed ^ 0x9e37_79b9_7f4a_7c15);
    let roundtrip = roundtrip_residual(&ch, &v, &inputs, Exec::Sequential)?;
    let u = halmos_unitary(&v)?;
    let mut embedding_residual = 0.0f64;
    for s in &inputs {
        let top = u.embedded_dilation(s)?;
        embedding_residual = embedding_residual.max((&top - &v.conjugate(s)?).norm());
    }
    Ok(ChannelCheck {
        case,
        roundtrip,
        isometry_residual: v.isometry_residual,
        separation: res.separation_residual(&ch),
        unitarity_residual: u.unitarity_residual,
        embedding_residual,
    })
}

/// [`check_case`] over a batch, one channel per work item.
pub fn check_ensemble(
    cases: &[EnsembleCase],
    samples: usize,
    tol: &Tolerances,
    exec: Exec,
) -> Result<Vec<ChannelCheck>> {
    exec.map(cases, |&case| check_case(case, samples, tol))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_cover_matrix_units_first() {
        let inputs = test_inputs(3, 2, 5);
        assert_eq!(inputs.len(), 11);
        assert_eq!(inputs[5], ComplexMatrix::elementary(3, 3, 1, 2));
        assert!((inputs[10].trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_roundtrip_is_exact() {
        let ch = ChannelSpec::identity(2).unwrap();
        let (_, v) = dilate(&ch, &Tolerances::default()).unwrap();
        let r = roundtrip_residual(&ch, &v, &test_inputs(2, 5, 1), Exec::Parallel).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn ensemble_is_deterministic_across_strategies() {
        let cases = ensemble_cases(6, 4, 3, 42);
        assert!(cases.iter().all(|c| c.dim_in <= c.dim_out * c.env));
        let tol = Tolerances::default();
        let a = check_ensemble(&cases, 2, &tol, Exec::Sequential).unwrap();
        let b = check_ensemble(&cases, 2, &tol, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
