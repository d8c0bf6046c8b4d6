//! Completion of third-order tensors of rank possibly above `d` by
//! contraction.
//!
//! The observed set is split into three overlapping subsets `I, J, K`. Two
//! copies observed on `I` and `J` are contracted along the first mode into
//! the `d² × d²` matrix
//!
//! ```text
//! W[(i₁,i₂),(j₁,j₂)] = δ⁻² Σ_ℓ Ẏ[ℓ,i₁,j₁] Ÿ[ℓ,i₂,j₂]
//! ```
//!
//! whose leading left singular vectors span an estimate `Q` of
//! `span{a_s ⊗ a_s}`. The copy observed on `K` is debiased and projected by
//! `Q ⊗ I_d`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::RngCore;

use crate::completion::{CompletionResult, Diagnostics, RegimeWarning};
use crate::error::{Error, Result};
use crate::math;
use crate::random::{stream_rng, uniform};
use crate::spectral::{apply_mode_projection, spectrum, ProjectionPattern, SpectralProjector, SpectrumSide};
use crate::tensor::{num_entries, ObservationMask, PartialTensor};

/// Membership cells of an entry of `E`, as bitmasks with bit 0 for `I`,
/// bit 1 for `J` and bit 2 for `K`. Index `c` holds cell `c + 1`.
pub const CELLS: [u8; 7] = [1, 2, 3, 4, 5, 6, 7];

/// `δ = 1 − (1 − |E|/d³)^{1/3}`, the per-subset rate for which
/// `1 − (1 − δ)³ = |E|/d³`.
pub fn delta_from_mask(mask: &ObservationMask) -> Result<f64> {
    if mask.order() != 3 {
        return Err(Error::UnsupportedOrder(mask.order()));
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let f = mask.len() as f64 / num_entries(3, mask.dim()) as f64;
    Ok(-math::expm1(math::log1p(-f) / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// Cell sizes fixed by inclusion–exclusion of `|I| = d³δ`,
    /// `|I∩J| = d³δ²`, `|I∩J∩K| = d³δ³`.
    ExactSizes,
    /// Every entry of `E` gets an independent `Ber(δ)` triple conditioned
    /// on at least one success.
    #[default]
    Bernoulli,
}

/// Probability of each cell in [`CELLS`] for an entry known to lie in `E`.
pub fn cell_probabilities(delta: f64) -> [f64; 7] {
    let q = 1.0 - delta;
    let covered = 1.0 - q * q * q;
    CELLS.map(|c| {
        let m = c.count_ones() as i32;
        math::powf(delta, m as f64) * math::powf(q, (3 - m) as f64) / covered
    })
}

/// Target size of each cell in [`CELLS`] for `d³ = total`.
pub fn cell_targets(total: f64, delta: f64) -> [f64; 7] {
    let s1 = total * delta;
    let s2 = s1 * delta;
    let s3 = s2 * delta;
    CELLS.map(|c| match c.count_ones() {
        1 => s1 - 2.0 * s2 + s3,
        2 => s2 - s3,
        _ => s3,
    })
}

/// Rounds `targets` to integers summing to `n` by largest remainder, ties
/// going to the lower cell.
fn largest_remainder(targets: &[f64; 7], n: usize) -> [usize; 7] {
    let mut counts = targets.map(|t| math::floor(t.max(0.0)) as usize);
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..7).collect();
    order.sort_by(|&a, &b| {
        let ra = targets[a] - math::floor(targets[a]);
        let rb = targets[b] - math::floor(targets[b]);
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    if assigned <= n {
        for &c in order.iter().cycle().take(n - assigned) {
            counts[c] += 1;
        }
    } else {
        let mut excess = assigned - n;
        for &c in order.iter().rev().cycle() {
            if excess == 0 {
                break;
            }
            if counts[c] > 0 {
                counts[c] -= 1;
                excess -= 1;
            }
        }
    }
    counts
}

/// The subsets `I, J, K` of `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleSplit {
    pub i: ObservationMask,
    pub j: ObservationMask,
    pub k: ObservationMask,
    pub delta: f64,
    pub mode: SplitMode,
    /// Number of entries of `E` in each cell of [`CELLS`].
    pub cell_counts: [usize; 7],
    /// Largest `|count − target|` over the cells; zero in Bernoulli mode.
    pub max_deviation: f64,
}

/// Splits `E` into `I, J, K` with `I ∪ J ∪ K = E`.
pub fn split_three<R: RngCore + ?Sized>(mask: &ObservationMask, delta: f64, mode: SplitMode, rng: &mut R) -> Result<TripleSplit> {
    if mask.order() != 3 {
        return Err(Error::UnsupportedOrder(mask.order()));
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, 1]",
        });
    }
    let n = mask.len();
    let mut cell_of = alloc::vec![0u8; n];
    let (cell_counts, max_deviation) = match mode {
        SplitMode::ExactSizes => {
            let targets = cell_targets(num_entries(3, mask.dim()) as f64, delta);
            let counts = largest_remainder(&targets, n);
            let dev = targets
                .iter()
                .zip(&counts)
                .fold(0.0f64, |m, (&t, &c)| m.max((c as f64 - t).abs()));
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mut pos = 0;
            for (c, &count) in counts.iter().enumerate() {
                for &p in &perm[pos..pos + count] {
                    cell_of[p] = CELLS[c];
                }
                pos += count;
            }
            (counts, dev)
        }
        SplitMode::Bernoulli => {
            let probs = cell_probabilities(delta);
            let mut counts = [0usize; 7];
            for slot in cell_of.iter_mut() {
                let u = uniform(rng);
                let mut acc = 0.0;
                let mut chosen = 6;
                for (c, &p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        chosen = c;
                        break;
                    }
                }
                *slot = CELLS[chosen];
                counts[chosen] += 1;
            }
            (counts, 0.0)
        }
    };
    let pick = |bit: u8| {
        let offsets: Vec<usize> = mask
            .offsets()
            .iter()
            .zip(&cell_of)
            .filter(|(_, &c)| c & bit != 0)
            .map(|(&o, _)| o)
            .collect();
        ObservationMask::from_sorted_offsets(3, mask.dim(), offsets)
    };
    Ok(TripleSplit {
        i: pick(1),
        j: pick(2),
        k: pick(4),
        delta,
        mode,
        cell_counts,
        max_deviation,
    })
}

/// `W = δ⁻² Σ_ℓ Ẏ_ℓ ⊗ Ÿ_ℓ`, with `Ẏ_ℓ` the `d × d` slice at first index `ℓ`.
///
/// Only revealed entries contribute, and every entry of `W` accumulates its
/// terms in increasing `ℓ`.
pub fn contract(y_dot: &PartialTensor, y_ddot: &PartialTensor, delta: f64) -> Result<DMatrix<f64>> {
    if y_dot.order() != 3 || y_ddot.order() != 3 {
        return Err(Error::UnsupportedOrder(if y_dot.order() != 3 { y_dot.order() } else { y_ddot.order() }));
    }
    let d = y_dot.dim();
    if y_ddot.dim() != d {
        return Err(Error::ShapeMismatch(alloc::format!("contracting d={d} with d={}", y_ddot.dim())));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, 1]",
        });
    }
    let d2 = d * d;
    let slices = |y: &PartialTensor| {
        let mut out: Vec<Vec<(usize, usize, f64)>> = alloc::vec![Vec::new(); d];
        let values = y.tensor().values();
        for &o in y.mask().offsets() {
            let v = values[o];
            if v != 0.0 {
                let rest = o % d2;
                out[o / d2].push((rest / d, rest % d, v));
            }
        }
        out
    };
    let (a, b) = (slices(y_dot), slices(y_ddot));
    // Column-major: W[r, c] lives at r + c·d².
    let mut w = alloc::vec![0.0; d2 * d2];
    for (a_l, b_l) in a.iter().zip(&b) {
        for &(i1, j1, x) in a_l {
            let base_r = i1 * d;
            let base_c = j1 * d;
            for &(i2, j2, y) in b_l {
                w[base_r + i2 + (base_c + j2) * d2] += x * y;
            }
        }
    }
    let scale = 1.0 / (delta * delta);
    for v in w.iter_mut() {
        *v *= scale;
    }
    Ok(DMatrix::from_vec(d2, d2, w))
}

/// `λ⋆ = (d^{3/2} max{d, r} / n)^{4/5}`.
pub fn lambda_star_theorem2(n: f64, d: usize, r: usize) -> Result<f64> {
    for (name, v) in [("n", n), ("d", d as f64), ("r", r as f64)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                range: "(0, inf)",
            });
        }
    }
    let df = d as f64;
    Ok(math::powf(math::powf(df, 1.5) * df.max(r as f64) / n, 0.8))
}

/// How the singular-value threshold `λ⋆` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContractionThreshold {
    Fixed(f64),
    /// [`lambda_star_theorem2`] with the given rank.
    Theorem { rank: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionConfig {
    pub threshold: ContractionThreshold,
    pub split: SplitMode,
    /// Which spectrum of `W` defines `Q`.
    pub side: SpectrumSide,
    pub seed: u64,
    pub stream: u64,
}

impl Default for ContractionConfig {
    fn default() -> Self {
        ContractionConfig {
            threshold: ContractionThreshold::Fixed(0.0),
            split: SplitMode::Bernoulli,
            side: SpectrumSide::LeftSingular,
            seed: 0,
            stream: 0,
        }
    }
}

/// Runs the contraction estimator on `Π_E T`.
pub fn complete_contraction(y: &PartialTensor, cfg: &ContractionConfig) -> Result<CompletionResult> {
    let d = y.dim();
    let delta = delta_from_mask(y.mask())?;
    if cfg.side == SpectrumSide::Eigen {
        return Err(Error::Config("W is not symmetric; use the left-singular or symmetrized side".into()));
    }
    let n = y.mask().len();
    let lambda_star = match cfg.threshold {
        ContractionThreshold::Fixed(l) if l >= 0.0 => l,
        ContractionThreshold::Fixed(l) => {
            return Err(Error::Config(alloc::format!("fixed threshold {l} must be non-negative")));
        }
        ContractionThreshold::Theorem { rank } => lambda_star_theorem2(n as f64, d, rank)?,
    };

    let mut rng = stream_rng(cfg.seed, cfg.stream);
    let split = split_three(y.mask(), delta, cfg.split, &mut rng)?;
    let y_dot = y.restrict(&split.i)?;
    let y_ddot = y.restrict(&split.j)?;
    let y_tdot = y.restrict(&split.k)?;

    let w = contract(&y_dot, &y_ddot, delta)?;
    let spec = spectrum(&w, cfg.side)?;
    let w_op = spec.op_norm();
    // An all-zero W carries no directions to keep.
    let q = if w_op == 0.0 {
        SpectralProjector::zero(d * d)
    } else {
        spec.projector(lambda_star)
    };
    let t_hat = y_tdot.tensor().scaled(1.0 / delta);
    let estimate = apply_mode_projection(&t_hat, &q, ProjectionPattern::LeadingPair)?;

    let mut warnings = Vec::new();
    if split.max_deviation > 0.5 {
        warnings.push(RegimeWarning::SplitRounding {
            max_deviation: split.max_deviation,
        });
    }
    Ok(CompletionResult {
        estimate,
        diagnostics: Diagnostics {
            n,
            delta,
            delta2: None,
            spectrum_op_norm: w_op,
            lambda_star,
            rank_q: q.rank(),
            warnings,
            elapsed: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{from_components, sample_components};
    use crate::sampling::sample_exact;
    use crate::tensor::{project_mask, Tensor};
    use nalgebra::DVector;

    fn mask_with_len(d: usize, n: usize) -> ObservationMask {
        ObservationMask::from_offsets(3, d, (0..n).collect()).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_from_mask(&ObservationMask::full(3, 4)).unwrap(), 1.0);
        assert!((delta_from_mask(&mask_with_len(2, 7)).unwrap() - 0.5).abs() < 1e-15);
        let small = delta_from_mask(&mask_with_len(10, 1)).unwrap();
        let approx = 1.0 / 3000.0;
        assert!((small - approx).abs() / small < 1e-3);
        let exact = 1.0 - (1.0 - 1e-3f64).cbrt();
        assert!((small - exact).abs() < 1e-15);
        assert_eq!(delta_from_mask(&ObservationMask::empty(3, 3)), Err(Error::EmptyMask));
        assert_eq!(delta_from_mask(&ObservationMask::full(2, 3)), Err(Error::UnsupportedOrder(2)));
    }

    #[test]
    fn cell_probabilities_sum_and_marginals() {
        for delta in [0.05, 0.3, 0.5, 0.9, 1.0] {
            let p = cell_probabilities(delta);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let covered = 1.0 - (1.0 - delta).powi(3);
            for bits in [1u8, 2, 4, 3, 5, 6, 7] {
                let m: f64 = CELLS
                    .iter()
                    .zip(&p)
                    .filter(|(&c, _)| c & bits == bits)
                    .map(|(_, &p)| p)
                    .sum();
                let expect = delta.powi(bits.count_ones() as i32);
                assert!((m * covered - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exact_split_of_half_rate() {
        let mask = mask_with_len(10, 875);
        let delta = delta_from_mask(&mask).unwrap();
        let s = split_three(&mask, delta, SplitMode::ExactSizes, &mut stream_rng(1, 2)).unwrap();
        assert_eq!(s.cell_counts, [125; 7]);
        assert_eq!(s.max_deviation, 0.0);
        assert_eq!((s.i.len(), s.j.len(), s.k.len()), (500, 500, 500));
        let ij = s.i.offsets().iter().filter(|&&o| s.j.contains_offset(o)).count();
        let ijk = s.i.offsets().iter().filter(|&&o| s.j.contains_offset(o) && s.k.contains_offset(o)).count();
        assert_eq!((ij, ijk), (250, 125));
    }

    #[test]
    fn full_rate_split_is_triple_cell() {
        let mask = ObservationMask::full(3, 3);
        for mode in [SplitMode::ExactSizes, SplitMode::Bernoulli] {
            let s = split_three(&mask, 1.0, mode, &mut stream_rng(0, 0)).unwrap();
            assert_eq!(s.i, mask);
            assert_eq!(s.j, mask);
            assert_eq!(s.k, mask);
            assert_eq!(s.cell_counts, [0, 0, 0, 0, 0, 0, 27]);
        }
    }

    #[test]
    fn split_union_is_e_and_counts_are_consistent() {
        let mut rng = stream_rng(4, 4);
        let mask = sample_exact(3, 7, 200, &mut rng).unwrap();
        let delta = delta_from_mask(&mask).unwrap();
        for mode in [SplitMode::ExactSizes, SplitMode::Bernoulli] {
            let s = split_three(&mask, delta, mode, &mut rng).unwrap();
            assert_eq!(s.cell_counts.iter().sum::<usize>(), 200);
            let mut union: Vec<usize> = s
                .i
                .offsets()
                .iter()
                .chain(s.j.offsets())
                .chain(s.k.offsets())
                .copied()
                .collect();
            union.sort_unstable();
            union.dedup();
            assert_eq!(union, mask.offsets());
            let size = |bit: u8| -> usize { CELLS.iter().zip(&s.cell_counts).filter(|(&c, _)| c & bit != 0).map(|(_, &n)| n).sum() };
            assert_eq!(size(1), s.i.len());
            assert_eq!(size(2), s.j.len());
            assert_eq!(size(4), s.k.len());
            if mode == SplitMode::ExactSizes {
                assert!(s.max_deviation < 1.0);
                let t = cell_targets(343.0, delta);
                let i_target = t[0] + t[2] + t[4] + t[6];
                assert!((s.i.len() as f64 - i_target).abs() <= 4.0);
                assert!((i_target - 343.0 * delta).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn largest_remainder_hits_total() {
        let t = [1.4, 1.4, 1.4, 0.6, 0.6, 0.6, 0.0];
        assert_eq!(largest_remainder(&t, 6), [1, 1, 1, 1, 1, 1, 0]);
        let t = [0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0];
        assert_eq!(largest_remainder(&t, 2), [1, 1, 0, 0, 0, 0, 0]);
        assert_eq!(largest_remainder(&[0.0; 7], 0), [0; 7]);
    }

    #[test]
    fn contract_single_entry() {
        let v = -1.5;
        let y = PartialTensor::from_observations(3, 2, [([0usize, 0, 0], v)]).unwrap();
        let w = contract(&y, &y, 1.0).unwrap();
        assert_eq!(w[(0, 0)], v * v);
        assert_eq!(w.iter().filter(|x| **x != 0.0).count(), 1);
        let w = contract(&y, &y, 0.5).unwrap();
        assert_eq!(w[(0, 0)], 4.0 * v * v);
    }

    #[test]
    fn contract_zero_and_shape_errors() {
        let z = project_mask(&Tensor::zeros(3, 3), &ObservationMask::full(3, 3)).unwrap();
        assert!(contract(&z, &z, 1.0).unwrap().iter().all(|x| *x == 0.0));
        let other = project_mask(&Tensor::zeros(3, 2), &ObservationMask::full(3, 2)).unwrap();
        assert!(matches!(contract(&z, &other, 1.0), Err(Error::ShapeMismatch(_))));
        let four = project_mask(&Tensor::zeros(4, 2), &ObservationMask::full(4, 2)).unwrap();
        assert!(contract(&four, &four, 1.0).is_err());
        assert!(contract(&z, &z, 0.0).is_err());
    }

    #[test]
    fn contract_rank_one_full() {
        let a = DVector::from_vec(alloc::vec![0.3, -1.2, 0.7]);
        let t = from_components(core::slice::from_ref(&a), 3).unwrap();
        let y = project_mask(&t, &ObservationMask::full(3, 3)).unwrap();
        let w = contract(&y, &y, 1.0).unwrap();
        let aa = a.kronecker(&a);
        let expect = &aa * aa.transpose() * a.norm_squared();
        assert!((w - expect).abs().max() < 1e-13);
    }

    #[test]
    fn contract_matches_direct_sum() {
        let mut rng = stream_rng(9, 9);
        let d = 3;
        let t = Tensor::from_fn(3, d, |_| uniform(&mut rng) - 0.5);
        let m1 = sample_exact(3, d, 15, &mut rng).unwrap();
        let m2 = sample_exact(3, d, 20, &mut rng).unwrap();
        let (y1, y2) = (project_mask(&t, &m1).unwrap(), project_mask(&t, &m2).unwrap());
        let w = contract(&y1, &y2, 0.7).unwrap();
        for i1 in 0..d {
            for i2 in 0..d {
                for j1 in 0..d {
                    for j2 in 0..d {
                        let mut s = 0.0;
                        for l in 0..d {
                            s += y1.tensor().get(&[l, i1, j1]) * y2.tensor().get(&[l, i2, j2]);
                        }
                        let got = w[(i1 * d + i2, j1 * d + j2)];
                        assert!((got - s / 0.49).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn lambda_theorem2_examples() {
        let d = 16usize;
        let base = 64.0 * 16.0;
        assert!((lambda_star_theorem2(base, d, 4).unwrap() - 1.0).abs() < 1e-12);
        assert!((lambda_star_theorem2(32.0 * base, d, 4).unwrap() - 1.0 / 16.0).abs() < 1e-12);
        assert_eq!(lambda_star_theorem2(500.0, d, 1).unwrap(), lambda_star_theorem2(500.0, d, 16).unwrap());
        assert!(lambda_star_theorem2(500.0, d, 32).unwrap() > lambda_star_theorem2(500.0, d, 16).unwrap());
        assert!(lambda_star_theorem2(0.0, d, 1).is_err());
    }

    #[test]
    fn rank_one_full_observation_is_exact() {
        let mut rng = stream_rng(5, 0);
        let mut a = sample_components(&mut rng, 6, 1, Default::default()).remove(0);
        a /= a.norm();
        let t = from_components(core::slice::from_ref(&a), 3).unwrap();
        let y = project_mask(&t, &ObservationMask::full(3, 6)).unwrap();
        for side in [SpectrumSide::LeftSingular, SpectrumSide::SymmetrizedEigen] {
            let cfg = ContractionConfig {
                threshold: ContractionThreshold::Fixed(0.5),
                side,
                ..Default::default()
            };
            let r = complete_contraction(&y, &cfg).unwrap();
            assert_eq!(r.diagnostics.rank_q, 1);
            assert!((r.diagnostics.spectrum_op_norm - 1.0).abs() < 1e-12);
            let err = r.estimate.sub(&t).unwrap().frobenius() / t.frobenius();
            assert!(err < 1e-8, "{err}");
        }
    }

    #[test]
    fn threshold_above_spectrum_gives_zero() {
        let mut rng = stream_rng(6, 0);
        let comps = sample_components(&mut rng, 5, 3, Default::default());
        let t = from_components(&comps, 3).unwrap();
        let y = project_mask(&t, &sample_exact(3, 5, 90, &mut rng).unwrap()).unwrap();
        let cfg = ContractionConfig {
            threshold: ContractionThreshold::Fixed(1e9),
            ..Default::default()
        };
        let r = complete_contraction(&y, &cfg).unwrap();
        assert!(r.estimate.is_zero());
        assert_eq!(r.diagnostics.rank_q, 0);
    }

    #[test]
    fn k_rescaling_is_unbiased_by_enumeration() {
        let d = 2;
        let t = Tensor::from_fn(3, d, |ix| 1.0 + ix[0] as f64 - 2.0 * ix[1] as f64 + 0.5 * ix[2] as f64);
        let delta: f64 = 0.35;
        // Marginal rate of K implied by the conditional cell law.
        let covered = 1.0 - (1.0 - delta).powi(3);
        let p = cell_probabilities(delta);
        let rate = covered * (p[3] + p[4] + p[5] + p[6]);
        let total = num_entries(3, d);
        let mut mean = alloc::vec![0.0; total];
        for bits in 0u32..(1 << total) {
            let offsets: Vec<usize> = (0..total).filter(|o| bits >> o & 1 == 1).collect();
            let weight = rate.powi(offsets.len() as i32) * (1.0 - rate).powi((total - offsets.len()) as i32);
            let k = ObservationMask::from_offsets(3, d, offsets).unwrap();
            let y = project_mask(&t, &k).unwrap();
            for (m, v) in mean.iter_mut().zip(y.tensor().values()) {
                *m += weight * v / delta;
            }
        }
        for (m, v) in mean.iter().zip(t.values()) {
            assert!((m - v).abs() < 1e-12);
        }
    }

    #[test]
    fn config_errors() {
        let y = project_mask(&Tensor::zeros(3, 2), &ObservationMask::full(3, 2)).unwrap();
        let cfg = ContractionConfig {
            side: SpectrumSide::Eigen,
            ..Default::default()
        };
        assert!(matches!(complete_contraction(&y, &cfg), Err(Error::Config(_))));
        let cfg = ContractionConfig {
            threshold: ContractionThreshold::Fixed(-1.0),
            ..Default::default()
        };
        assert!(matches!(complete_contraction(&y, &cfg), Err(Error::Config(_))));
        let y4 = project_mask(&Tensor::zeros(4, 2), &ObservationMask::full(4, 2)).unwrap();
        assert_eq!(complete_contraction(&y4, &ContractionConfig::default()), Err(Error::UnsupportedOrder(4)));
    }

}
