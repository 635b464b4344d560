#![allow(clippy::needless_range_loop)]

use choichol::channel::apply_universal_psi;
use choichol::random::Sampler;
use choichol::spectral::inner_product;
use choichol::tensor::outer;
use choichol::*;
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rel(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..12) {
        let m = Sampler::seeded(seed).hermitian(n);
        let eig = hermitian_eig(&m, &tol()).unwrap();
        let u = &eig.eigenvectors;
        let gram = &u.adjoint() * u;
        prop_assert!((&gram - &ComplexMatrix::identity(n)).norm() <= 1e-12 * n as f64);
        prop_assert!((&eig.map(|x| x) - &m).norm() <= 1e-12 * m.norm().max(1.0));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_squares_back(seed in any::<u64>(), n in 1usize..16) {
        let mut s = Sampler::seeded(seed);
        let a = s.hermitian(n);
        let p = &a * &a.adjoint();
        let r = psd_sqrt(&p, &tol()).unwrap();
        prop_assert!((&(&r * &r) - &p).norm() <= 1e-10 * p.norm());
    }

    #[test]
    fn pinv_penrose_conditions(seed in any::<u64>(), n in 1usize..10, rank in 1usize..10) {
        let m = Sampler::seeded(seed).psd(n, rank.min(n));
        let p = pinv_psd(&m, &tol()).unwrap();
        let mp = &m * &p;
        let pm = &p * &m;
        prop_assert!(rel(&(&mp * &m), &m) <= 1e-10);
        prop_assert!(rel(&(&pm * &p), &p) <= 1e-10);
        prop_assert!(mp.hermiticity_residual() <= 1e-10);
        prop_assert!(pm.hermiticity_residual() <= 1e-10);
        prop_assert!(rel(&(&mp * &mp), &mp) <= 1e-10);
    }

    #[test]
    fn partial_trace_keeps_trace(seed in any::<u64>(), a in 1usize..5, b in 1usize..5) {
        let m = Sampler::seeded(seed).gaussian_matrix(a * b, a * b);
        let t = m.trace();
        for keep in [Keep::First, Keep::Second] {
            let r = partial_trace(&m, a, b, keep).unwrap();
            prop_assert!((r.trace() - t).norm() <= 1e-12 * t.norm() + 1e-12);
        }
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>(), p in 1usize..4, q in 1usize..4, r in 1usize..4) {
        let mut s = Sampler::seeded(seed);
        let (a, c) = (s.gaussian_matrix(p, q), s.gaussian_matrix(q, r));
        let (b, d) = (s.gaussian_matrix(r, p), s.gaussian_matrix(p, q));
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(rel(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn psi_rank_one(seed in any::<u64>(), n in 1usize..4, d in 1usize..4) {
        let mut s = Sampler::seeded(seed);
        let w1 = s.gaussian_matrix(d, n * d);
        let w2 = s.gaussian_matrix(d, n * d);
        let out = apply_universal_psi(&outer(&vec(&w1), &vec(&w2)), n, d).unwrap();
        let direct = &w1 * &w2.adjoint();
        prop_assert!((&out - &direct).norm() <= 1e-12 * w1.norm() * w2.norm());
    }

    #[test]
    fn psi_trace_preserving_and_positive(seed in any::<u64>(), n in 1usize..3, d in 1usize..4) {
        let dim = n * d * d;
        let mut s = Sampler::seeded(seed);
        let g = s.gaussian_matrix(dim, dim);
        let out = apply_universal_psi(&g, n, d).unwrap();
        let trace_norm_bound: f64 = g.norm() * (dim as f64).sqrt();
        prop_assert!((out.trace() - g.trace()).norm() <= 1e-11 * trace_norm_bound);

        let rho = s.psd(dim, dim);
        let out = apply_universal_psi(&rho, n, d).unwrap();
        let min = hermitian_eig(&out, &tol()).unwrap().min_eigenvalue();
        prop_assert!(min >= -1e-10 * out.norm());
    }

    #[test]
    fn block_cauchy_schwarz_and_majorisation(seed in any::<u64>(), nb in 2usize..4, d in 1usize..4, rank in 1usize..8) {
        let mut s = Sampler::seeded(seed);
        let blocks = s.psd_blocks(nb, d, rank);
        let c = BlockMatrix::from_blocks(&blocks).unwrap();
        let cn = c.data().norm();
        let xi = s.gaussian_vector(d);
        let eta = s.gaussian_vector(d);
        let col = |v: &[C64]| ComplexMatrix::column(v);
        for i in 0..nb {
            for j in 0..nb {
                let cij = &blocks[i][j];
                let lhs = inner_product(&eta, cij, &xi).norm();
                let ri = psd_sqrt(&blocks[i][i], &tol()).unwrap();
                let rj = psd_sqrt(&blocks[j][j], &tol()).unwrap();
                let rhs = (&ri * &col(&eta)).norm() * (&rj * &col(&xi)).norm();
                prop_assert!(lhs <= rhs + 1e-10);

                let pi = &blocks[i][i] * &pinv_psd(&blocks[i][i], &tol()).unwrap();
                let pjinv = pinv_psd(&blocks[j][j], &tol()).unwrap();
                let pj = &blocks[j][j] * &pjinv;
                prop_assert!((&(&(&pi * cij) * &pj) - cij).norm() <= 1e-9 * cn);
                let maj = &(cij * &pjinv) * &blocks[j][j];
                prop_assert!((&maj - cij).norm() <= 1e-9 * cn);
            }
        }
    }

    #[test]
    fn apply_routes_agree(seed in any::<u64>(), n in 1usize..4, d in 1usize..4, k in 1usize..4) {
        let mut s = Sampler::seeded(seed);
        let ch = s.cp_channel(n, d, k).unwrap();
        let x = s.gaussian_matrix(n, n);
        let a = ch.apply(&x).unwrap();
        let b = ch.apply_via_choi(&x).unwrap();
        prop_assert!((&a - &b).norm() <= 1e-11 * a.norm().max(1.0));
        prop_assert!(ch.is_cp(1e-10).unwrap().verdict);
        prop_assert!(ch.is_hermiticity_preserving(1e-10));
    }

    #[test]
    fn cholesky_reconstructs(seed in any::<u64>(), nb in 1usize..6, d in 1usize..6, rank in 1usize..30) {
        let blocks = Sampler::seeded(seed).psd_blocks(nb, d, rank);
        let c = BlockMatrix::from_blocks(&blocks).unwrap();
        let f = choi_cholesky(&blocks, &tol()).unwrap();
        let cn = c.data().norm();
        prop_assert!((f.reconstruct().unwrap().data() - c.data()).norm() <= 1e-8 * cn);
        prop_assert!((f.reconstruct_ldl().unwrap().data() - c.data()).norm() <= 1e-8 * cn);
        for i in 0..nb {
            prop_assert!(f.d_spectrum(i).iter().all(|&x| x >= 0.0));
            prop_assert_eq!(f.l_hat(i, i), ComplexMatrix::identity(d));
            for j in i + 1..nb {
                prop_assert_eq!(f.l(i, j), ComplexMatrix::zeros(d, d));
            }
        }
        // L̂ R̂ = 1
        let (lh, rh) = (f.l_hat_blocks(), f.r_hat_blocks());
        let lh_norm: f64 = lh.iter().flatten().map(|b| b.norm().powi(2)).sum::<f64>().sqrt();
        for i in 0..nb {
            for j in 0..nb {
                let mut acc = ComplexMatrix::zeros(d, d);
                for k in 0..nb {
                    acc = acc + &lh[i][k] * &rh[k][j];
                }
                let target = if i == j { ComplexMatrix::identity(d) } else { ComplexMatrix::zeros(d, d) };
                prop_assert!((&acc - &target).norm() <= 1e-9 * (1.0 + lh_norm));
            }
        }
        let standalone = uni_triangular_inverse(&lh).unwrap();
        for i in 0..nb {
            for j in 0..nb {
                prop_assert!((&standalone[i][j] - &rh[i][j]).norm() <= 1e-10 * (1.0 + lh_norm * lh_norm));
            }
        }
    }

    #[test]
    fn cholesky_incremental_matches_direct(seed in any::<u64>(), nb in 2usize..6, d in 1usize..5, rank in 1usize..20) {
        let blocks = Sampler::seeded(seed).psd_blocks(nb, d, rank);
        let cn = BlockMatrix::from_blocks(&blocks).unwrap().data().norm();
        let direct = choi_cholesky(&blocks, &tol()).unwrap();
        let leading: Vec<Vec<ComplexMatrix>> =
            blocks[..nb - 1].iter().map(|r| r[..nb - 1].to_vec()).collect();
        let mut inc = choi_cholesky(&leading, &tol()).unwrap();
        inc.extend(&blocks[nb - 1][..nb]).unwrap();
        for i in 0..nb {
            for j in 0..=i {
                prop_assert!((&direct.l(i, j) - &inc.l(i, j)).norm() <= 1e-9 * cn);
            }
        }
    }

    #[test]
    fn rank_one_choi_has_vanishing_schur_blocks(seed in any::<u64>(), nb in 2usize..5, d in 1usize..5) {
        let blocks = Sampler::seeded(seed).psd_blocks(nb, d, 1);
        let f = choi_cholesky(&blocks, &tol()).unwrap();
        for i in 1..nb {
            prop_assert!(f.d(i).norm() <= 1e-10);
        }
    }

    #[test]
    fn stinespring_roundtrip(seed in any::<u64>(), n in 2usize..5, d in 2usize..5, env in 1usize..4) {
        prop_assume!(n <= d * env);
        let mut s = Sampler::seeded(seed);
        let (ch, _) = s.stinespring_channel(n, d, env).unwrap();
        let (res, v) = dilate(&ch, &tol()).unwrap();
        prop_assert!(v.isometry_residual <= 1e-9);
        let cn = ch.full_choi().data().norm();
        prop_assert!(res.separation_residual(&ch) <= 1e-8 * cn);
        for x in verify::test_inputs(n, 3, seed) {
            let out = reconstruct_channel(&v, &x).unwrap();
            prop_assert!((&out - &ch.apply(&x).unwrap()).norm() <= 1e-8);
        }
        let u = halmos_unitary(&v).unwrap();
        prop_assert!(u.unitarity_residual <= 1e-9);
    }
}

#[test]
fn approximant_converges_on_well_separated_spectrum() {
    // h_50(t) ≈ 2^50 t near zero, so eigenvalues must be exactly zero or ≥ 0.1;
    // roundoff-level "zeros" from a rotated basis would not converge.
    let mut s = Sampler::seeded(99);
    for _ in 0..20 {
        let n = 4;
        let u = s.isometry(n, n).unwrap();
        let lambdas: Vec<f64> = (0..n).map(|_| 0.1 + s.uniform()).collect();
        let m = &(&u * &ComplexMatrix::from_real_diagonal(&lambdas)) * &u.adjoint();
        let exact = pinv_psd(&m, &tol()).unwrap();
        let approx = pinv_approximant(&m, 50, &tol()).unwrap();
        assert!((&exact - &approx).norm() <= 1e-10);
    }
    let m = ComplexMatrix::from_real_diagonal(&[0.0, 0.1, 0.0, 3.5]);
    let exact = pinv_psd(&m, &tol()).unwrap();
    let approx = pinv_approximant(&m, 50, &tol()).unwrap();
    assert!((&exact - &approx).norm() <= 1e-10);
}
