use proptest::prelude::*;

use tensorfill_core::contraction::{cell_targets, contract, delta_from_mask, split_three, SplitMode, CELLS};
use tensorfill_core::matrix::{bhat, coherence, incoherence_params, unfolding_params};
use tensorfill_core::random::{from_components, sample_components, stream_rng, uniform, ComponentDistribution};
use tensorfill_core::sampling::sample_exact;
use tensorfill_core::spectral::{apply_mode_projection, sin_theta, singular_values, spectrum, threshold_projector};
use tensorfill_core::tensor::{
    frobenius_norm, max_abs, mode_unfolding, multilinear_rank, op_norm, project_mask, refold, unfold,
};
use tensorfill_core::{
    DMatrix, DVector, ObservationMask, ProjectionPattern, SpectralProjector, SpectrumSide, Tensor, DEFAULT_RANK_TOL,
};

fn random_tensor(order: usize, dim: usize, seed: u64) -> Tensor {
    let mut rng = stream_rng(seed, 11);
    Tensor::from_fn(order, dim, |_| uniform(&mut rng) * 2.0 - 1.0)
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = stream_rng(seed, 12);
    DMatrix::from_fn(rows, cols, |_, _| uniform(&mut rng) * 2.0 - 1.0)
}

fn orthonormal(m: usize, r: usize, seed: u64) -> DMatrix<f64> {
    let q = random_matrix(m, r, seed).qr().q();
    q.columns(0, r).into_owned()
}

fn shapes() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![(2usize..=5).prop_map(|k| (k, 2usize)), (2usize..=4).prop_map(|k| (k, 3usize)), Just((3, 6))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unfold_then_refold_is_identity((k, d) in shapes(), seed in any::<u64>()) {
        let t = random_tensor(k, d, seed);
        for a in 1..k {
            let x = unfold(&t, a, k - a).unwrap();
            let back = refold(&x);
            prop_assert_eq!(back.values(), t.values());
        }
    }

    #[test]
    fn unfold_is_linear((k, d) in shapes(), seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let s = random_tensor(k, d, seed);
        let t = random_tensor(k, d, seed ^ 1);
        let combo = s.scaled(alpha).add_scaled(&t, beta).unwrap();
        let a = k / 2;
        let lhs = unfold(&combo, a, k - a).unwrap().into_matrix();
        let rhs = unfold(&s, a, k - a).unwrap().into_matrix() * alpha + unfold(&t, a, k - a).unwrap().into_matrix() * beta;
        prop_assert!((lhs - rhs).abs().max() < 1e-12);
    }

    #[test]
    fn symmetric_mode_unfoldings_share_singular_values(d in 2usize..5, r in 1usize..4, seed in any::<u64>()) {
        let comps = sample_components(&mut stream_rng(seed, 0), d, r, ComponentDistribution::Gaussian);
        let t = from_components(&comps, 3).unwrap();
        let reference = singular_values(&mode_unfolding(&t, 0).unwrap());
        for mode in 1..3 {
            let s = singular_values(&mode_unfolding(&t, mode).unwrap());
            for (x, y) in reference.iter().zip(&s) {
                prop_assert!((x - y).abs() <= 1e-10 * reference[0].max(1e-300));
            }
        }
    }

    #[test]
    fn multilinear_rank_of_r_pure_tensors(d in 2usize..6, r in 1usize..7, seed in any::<u64>()) {
        let comps = sample_components(&mut stream_rng(seed, 0), d, r, ComponentDistribution::Rademacher);
        let t = from_components(&comps, 3).unwrap();
        let ranks = multilinear_rank(&t, DEFAULT_RANK_TOL).unwrap();
        for &m in &ranks.ranks {
            prop_assert!(m <= r.min(d));
        }
    }

    #[test]
    fn mask_projection_is_idempotent_and_contracting((k, d) in shapes(), seed in any::<u64>(), frac in 0.0f64..1.0) {
        let t = random_tensor(k, d, seed);
        let total = d.pow(k as u32);
        let n = ((total as f64) * frac) as usize;
        let mask = sample_exact(k, d, n, &mut stream_rng(seed, 3)).unwrap();
        let once = project_mask(&t, &mask).unwrap();
        let twice = project_mask(once.tensor(), &mask).unwrap();
        prop_assert_eq!(once.tensor().values(), twice.tensor().values());
        prop_assert!(once.tensor().frobenius() <= t.frobenius() + 1e-12);
    }

    #[test]
    fn norm_chain(rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()) {
        let x = random_matrix(rows, cols, seed);
        let (op, fro, inf) = (op_norm(&x), frobenius_norm(&x), max_abs(&x));
        prop_assert!(op <= fro * (1.0 + 1e-12));
        prop_assert!(fro <= ((rows * cols) as f64).sqrt() * inf * (1.0 + 1e-12));
    }

    #[test]
    fn threshold_projector_is_orthonormal_and_fixes_kept_vectors(n in 1usize..10, seed in any::<u64>(), lambda in 0.0f64..1.0) {
        let a = random_matrix(n, n, seed);
        let m = &a * a.transpose();
        let q = threshold_projector(&m, lambda, SpectrumSide::Eigen).unwrap();
        let gram = q.basis().transpose() * q.basis();
        prop_assert!((gram - DMatrix::identity(q.rank(), q.rank())).abs().max() < 1e-10);
        let spec = spectrum(&m, SpectrumSide::Eigen).unwrap();
        for (c, &v) in spec.values.iter().enumerate() {
            if v >= lambda {
                let u = spec.vectors.column(c).into_owned();
                prop_assert!((q.apply(&u) - &u).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn sin_theta_is_bounded_and_symmetric(m in 2usize..9, r in 1usize..3, seed in any::<u64>()) {
        let r = r.min(m);
        let p = SpectralProjector::new(orthonormal(m, r, seed), 0.0).unwrap();
        let u = SpectralProjector::new(orthonormal(m, r, seed ^ 7), 0.0).unwrap();
        let (a, b) = (sin_theta(&p, &u).unwrap(), sin_theta(&u, &p).unwrap());
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn mode_projections_are_contracting_projections(d in 2usize..4, k in 3usize..6, seed in any::<u64>()) {
        let t = random_tensor(k, d, seed);
        let mut patterns = vec![ProjectionPattern::for_unfolding(k).unwrap()];
        if k == 3 {
            patterns.push(ProjectionPattern::LeadingPair);
        }
        for pattern in patterns {
            let block = d.pow(pattern.group_size(k) as u32);
            let rank = 1 + (seed as usize) % block;
            let q = SpectralProjector::new(orthonormal(block, rank, seed ^ 5), 0.0).unwrap();
            let once = apply_mode_projection(&t, &q, pattern).unwrap();
            let twice = apply_mode_projection(&once, &q, pattern).unwrap();
            for (x, y) in once.values().iter().zip(twice.values()) {
                prop_assert!((x - y).abs() < 1e-10);
            }
            prop_assert!(once.frobenius() <= t.frobenius() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bhat_is_symmetric(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>(), delta in 0.05f64..=1.0) {
        let b = bhat(&random_matrix(rows, cols, seed), delta).unwrap();
        prop_assert!((&b - b.transpose()).abs().max() == 0.0);
    }

    #[test]
    fn incoherence_bounds(rows in 1usize..9, cols in 1usize..9, rank in 1usize..4, seed in any::<u64>()) {
        let x = if rank == 1 {
            random_matrix(rows, 1, seed) * random_matrix(1, cols, seed ^ 3)
        } else {
            random_matrix(rows, cols, seed)
        };
        let p = incoherence_params(&x).unwrap();
        let (d1, d2) = (rows as f64, cols as f64);
        let eps = 1e-9;
        prop_assert!(p.lambda >= 1.0 / d1 - eps && p.lambda <= d1 + eps);
        prop_assert!(p.rho >= 1.0 / d2 - eps && p.rho <= d2 + eps);
        let prod = p.lambda * p.gamma * p.rho;
        prop_assert!(prod >= 1.0 - eps && prod <= d1 * d2 * (1.0 + eps));
    }

    #[test]
    fn coherence_range(m in 1usize..10, r in 1usize..10, seed in any::<u64>()) {
        let r = r.min(m);
        let c = coherence(&orthonormal(m, r, seed)).unwrap();
        prop_assert!(c >= 1.0 - 1e-10 && c <= m as f64 / r as f64 + 1e-10);
    }

    #[test]
    fn unfolding_param_bounds(d in 2usize..6, r in 1usize..5, seed in any::<u64>()) {
        let comps = sample_components(&mut stream_rng(seed, 0), d, r, ComponentDistribution::Gaussian);
        let t = from_components(&comps, 3).unwrap();
        let p = unfolding_params(&t, DEFAULT_RANK_TOL).unwrap();
        prop_assert!(p.alpha >= 1.0 - 1e-9 && p.alpha <= (d * d * d) as f64 + 1e-9);
        prop_assert!(p.mu >= 1.0 - 1e-9 && p.mu <= p.big_r as f64 + 1e-9);
    }

    #[test]
    fn full_contraction_is_symmetric(d in 2usize..5, r in 1usize..6, seed in any::<u64>()) {
        let comps = sample_components(&mut stream_rng(seed, 0), d, r, ComponentDistribution::Gaussian);
        let t = from_components(&comps, 3).unwrap();
        let y = project_mask(&t, &ObservationMask::full(3, d)).unwrap();
        let w = contract(&y, &y, 1.0).unwrap();
        let scale = w.abs().max().max(1e-300);
        prop_assert!((&w - w.transpose()).abs().max() <= 1e-10 * scale);
    }

    #[test]
    fn full_contraction_of_orthogonal_components_is_psd(d in 2usize..5, r in 1usize..5, seed in any::<u64>()) {
        let r = r.min(d);
        let basis = orthonormal(d, r, seed);
        let comps: Vec<_> = (0..r).map(|s| basis.column(s) * (1.0 + s as f64)).collect();
        let t = from_components(&comps, 3).unwrap();
        let y = project_mask(&t, &ObservationMask::full(3, d)).unwrap();
        let w = contract(&y, &y, 1.0).unwrap();
        let scale = w.abs().max();
        prop_assert!((&w - w.transpose()).abs().max() <= 1e-10 * scale);
        let min_eig = w.symmetric_eigen().eigenvalues.min();
        prop_assert!(min_eig >= -1e-10 * scale);
    }

    #[test]
    fn exact_split_cells_match_inclusion_exclusion(d in 2usize..7, frac in 0.01f64..=1.0, seed in any::<u64>()) {
        let total = d * d * d;
        let n = ((total as f64 * frac).ceil() as usize).clamp(1, total);
        let mask = sample_exact(3, d, n, &mut stream_rng(seed, 1)).unwrap();
        let delta = delta_from_mask(&mask).unwrap();
        let s = split_three(&mask, delta, SplitMode::ExactSizes, &mut stream_rng(seed, 2)).unwrap();
        prop_assert_eq!(s.cell_counts.iter().sum::<usize>(), n);
        let targets = cell_targets(total as f64, delta);
        for (c, t) in s.cell_counts.iter().zip(&targets) {
            prop_assert!((*c as f64 - t).abs() < 1.0);
        }
        let size = |bits: u8| -> usize {
            CELLS.iter().zip(&s.cell_counts).filter(|(c, _)| **c & bits == bits).map(|(_, n)| *n).sum()
        };
        let ij = s.i.offsets().iter().filter(|o| s.j.contains_offset(**o)).count();
        let ijk = s.i.offsets().iter().filter(|o| s.j.contains_offset(**o) && s.k.contains_offset(**o)).count();
        prop_assert_eq!(size(1), s.i.len());
        prop_assert_eq!(size(3), ij);
        prop_assert_eq!(size(7), ijk);
        let s1 = total as f64 * delta;
        prop_assert!((s.i.len() as f64 - s1).abs() < 4.0);
        prop_assert!((ij as f64 - s1 * delta).abs() < 2.0);
        prop_assert!((ijk as f64 - s1 * delta * delta).abs() < 1.0);
    }
}

#[test]
fn full_contraction_can_be_indefinite() {
    // Two non-orthogonal components: the cross terms <a_s, a_t> A_s ⊗ A_t
    // push an eigenvalue below zero.
    let a = DVector::from_vec(vec![1.0, 0.0]);
    let b = DVector::from_vec(vec![-0.6, 0.8]);
    let t = from_components(&[a, b], 3).unwrap();
    let y = project_mask(&t, &ObservationMask::full(3, 2)).unwrap();
    let w = contract(&y, &y, 1.0).unwrap();
    assert!(w.symmetric_eigen().eigenvalues.min() < -1e-3);
}
