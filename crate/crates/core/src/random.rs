//! Random symmetric low-rank tensors `T = Σ_s a_s^{⊗k}` and the seeded
//! generator streams behind every experiment.
//!
//! Reproducibility contract:
//!
//! - Every stream is a ChaCha8 generator seeded with
//!   `ChaCha8Rng::seed_from_u64(seed)` and positioned on stream
//!   `stream_id(parts)` via `set_stream`. Streams with different ids never
//!   overlap, so replicates can be generated in any order or in parallel.
//! - Uniforms in `(0, 1]` and `[0, 1)` take the top 53 bits of `next_u64`.
//! - Standard normals come in pairs from the Box–Muller transform
//!   `sqrt(-2 ln u₁)·(cos 2πu₂, sin 2πu₂)` evaluated with `libm`.

use alloc::vec::Vec;

use nalgebra::DVector;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::tensor::Tensor;

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes a tuple of labels (replicate index, grid coordinates, purpose
/// tag) into a stream id.
pub fn stream_id(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6a09_e667_f3bc_c908, |h, &p| mix(h ^ mix(p)))
}

/// Generator for stream `stream` of base seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform in `[0, 1)`.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * TWO_POW_M53
}

/// Uniform in `(0, 1]`.
fn uniform_open0<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * TWO_POW_M53
}

/// Two independent standard normals.
pub fn normal_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1 = uniform_open0(rng);
    let u2 = uniform(rng);
    let radius = math::sqrt(-2.0 * math::ln(u1));
    let angle = 2.0 * core::f64::consts::PI * u2;
    (radius * math::cos(angle), radius * math::sin(angle))
}

/// Fills a vector with i.i.d. standard normals.
pub fn standard_normals<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len + 1);
    while out.len() < len {
        let (a, b) = normal_pair(rng);
        out.push(a);
        out.push(b);
    }
    out.truncate(len);
    out
}

/// Law of the components `a_s`. Both are symmetric with `E[a aᵀ] = I/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComponentDistribution {
    /// `N(0, I/d)`.
    #[default]
    Gaussian,
    /// Independent entries `±1/√d`.
    Rademacher,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomTensorSpec {
    pub order: usize,
    pub dim: usize,
    pub rank: usize,
    pub distribution: ComponentDistribution,
    pub seed: u64,
    /// Stream of `seed` to draw from; experiments give each replicate its own.
    pub stream: u64,
    /// Subgaussian scale of the components, recorded for diagnostics only.
    pub tau: f64,
}

impl RandomTensorSpec {
    pub fn new(order: usize, dim: usize, rank: usize, seed: u64) -> Self {
        RandomTensorSpec {
            order,
            dim,
            rank,
            distribution: ComponentDistribution::Gaussian,
            seed,
            stream: 0,
            tau: 1.0,
        }
    }
}

/// Draws `r` i.i.d. components of length `d`.
pub fn sample_components<R: RngCore + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
    distribution: ComponentDistribution,
) -> Vec<DVector<f64>> {
    let scale = 1.0 / math::sqrt(dim as f64);
    (0..rank)
        .map(|_| match distribution {
            ComponentDistribution::Gaussian => {
                let z = standard_normals(rng, dim);
                DVector::from_iterator(dim, z.into_iter().map(|v| v * scale))
            }
            ComponentDistribution::Rademacher => {
                let mut bits = 0u64;
                let mut left = 0;
                DVector::from_fn(dim, |_, _| {
                    if left == 0 {
                        bits = rng.next_u64();
                        left = 64;
                    }
                    let sign = if bits & 1 == 1 { scale } else { -scale };
                    bits >>= 1;
                    left -= 1;
                    sign
                })
            }
        })
        .collect()
}

/// The random tensor of `spec` and the components that built it.
pub fn generate(spec: &RandomTensorSpec) -> Result<(Tensor, Vec<DVector<f64>>)> {
    if spec.dim == 0 || spec.rank == 0 || spec.order == 0 {
        return Err(Error::Config(alloc::format!(
            "order, dimension and rank must be positive (k={}, d={}, r={})",
            spec.order,
            spec.dim,
            spec.rank
        )));
    }
    let mut rng = stream_rng(spec.seed, spec.stream);
    let components = sample_components(&mut rng, spec.dim, spec.rank, spec.distribution);
    let t = from_components(&components, spec.order)?;
    Ok((t, components))
}

/// `T_u = Σ_s Π_m a_s[u_m]`, evaluated once per permutation class so the
/// result is exactly symmetric.
pub fn from_components(components: &[DVector<f64>], order: usize) -> Result<Tensor> {
    let Some(first) = components.first() else {
        return Err(Error::Config("at least one component is required".into()));
    };
    let dim = first.len();
    if let Some(bad) = components.iter().find(|c| c.len() != dim) {
        return Err(Error::ShapeMismatch(alloc::format!(
            "component of length {} among components of length {dim}",
            bad.len()
        )));
    }
    if order == 0 || dim == 0 {
        return Err(Error::ShapeMismatch("empty components or order 0".into()));
    }
    let t = Tensor::symmetric_from_fn(order, dim, |sorted| {
        components
            .iter()
            .map(|a| sorted.iter().map(|&i| a[i]).product::<f64>())
            .sum()
    });
    Ok(t.with_symmetric(true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_basis_component() {
        let mut e1 = DVector::zeros(3);
        e1[0] = 1.0;
        let t = from_components(&[e1.clone()], 3).unwrap();
        assert_eq!(t.get(&[0, 0, 0]), 1.0);
        assert_eq!(t.values().iter().filter(|&&v| v != 0.0).count(), 1);

        let t4 = from_components(&[e1], 4).unwrap();
        assert_eq!(t4.get(&[0, 0, 0, 0]), 1.0);
        assert_eq!(t4.values().iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn two_orthonormal_components() {
        let e1 = DVector::from_vec(alloc::vec![1.0, 0.0, 0.0]);
        let e2 = DVector::from_vec(alloc::vec![0.0, 1.0, 0.0]);
        let t = from_components(&[e1, e2], 3).unwrap();
        let nz: Vec<f64> = t.values().iter().copied().filter(|&v| v != 0.0).collect();
        assert_eq!(nz, alloc::vec![1.0, 1.0]);
    }

    #[test]
    fn frobenius_matches_gram_identity() {
        let mut rng = stream_rng(5, 0);
        let comps = sample_components(&mut rng, 3, 2, ComponentDistribution::Gaussian);
        let t = from_components(&comps, 3).unwrap();
        // Direct summation over entries, independent of the construction.
        let mut direct = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    let v: f64 = comps.iter().map(|a| a[i] * a[j] * a[l]).sum();
                    direct += v * v;
                }
            }
        }
        let mut gram = 0.0;
        for a in &comps {
            for b in &comps {
                gram += a.dot(b).powi(3);
            }
        }
        assert!((direct - gram).abs() < 1e-10);
        assert!((t.frobenius().powi(2) - gram).abs() < 1e-10);
    }

    #[test]
    fn generated_tensor_is_exactly_symmetric() {
        let mut spec = RandomTensorSpec::new(3, 6, 4, 1);
        let (t, comps) = generate(&spec).unwrap();
        assert_eq!(comps.len(), 4);
        assert!(t.check_symmetry(0.0));
        assert!(t.is_symmetric());
        spec.distribution = ComponentDistribution::Rademacher;
        let (t, comps) = generate(&spec).unwrap();
        assert!(t.check_symmetry(0.0));
        for c in &comps {
            assert!(c.iter().all(|&v| (v.abs() - 1.0 / 6f64.sqrt()).abs() < 1e-15));
        }
    }

    #[test]
    fn generation_is_deterministic_per_stream() {
        let spec = RandomTensorSpec::new(3, 5, 2, 42);
        assert_eq!(generate(&spec).unwrap().0, generate(&spec).unwrap().0);
        let other = RandomTensorSpec { stream: 1, ..spec.clone() };
        assert_ne!(generate(&spec).unwrap().0, generate(&other).unwrap().0);
    }

    #[test]
    fn component_length_mismatch() {
        let a = DVector::zeros(3);
        let b = DVector::zeros(4);
        assert!(from_components(&[a, b], 3).is_err());
        assert!(from_components(&[], 3).is_err());
    }

    #[test]
    fn stream_ids_separate_labels() {
        assert_ne!(stream_id(&[1, 2]), stream_id(&[2, 1]));
        assert_ne!(stream_id(&[0]), stream_id(&[0, 0]));
        assert_eq!(stream_id(&[7, 8, 9]), stream_id(&[7, 8, 9]));
    }

    #[test]
    fn uniforms_in_range() {
        let mut rng = stream_rng(0, 0);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
            let v = uniform_open0(&mut rng);
            assert!(v > 0.0 && v <= 1.0);
        }
    }
}
