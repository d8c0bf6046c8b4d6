//! Random observation sets: uniform subsets of exact size, or independent
//! Bernoulli reveals.

use alloc::vec::Vec;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::random::uniform;
use crate::tensor::{num_entries, ObservationMask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    /// A uniformly random subset of exactly `n` entries.
    #[default]
    ExactN,
    /// Every entry revealed independently with probability `n / d^k`.
    Bernoulli,
}

/// Uniformly random `n`-subset of `[d]^k`.
pub fn sample_exact<R: RngCore + ?Sized>(order: usize, dim: usize, n: usize, rng: &mut R) -> Result<ObservationMask> {
    let capacity = num_entries(order, dim);
    if n > capacity {
        return Err(Error::OverfullMask { n, capacity });
    }
    let mut offsets = rand::seq::index::sample(rng, capacity, n).into_vec();
    offsets.sort_unstable();
    Ok(ObservationMask::from_sorted_offsets(order, dim, offsets))
}

/// Every entry of `[d]^k` independently with probability `p`.
pub fn sample_bernoulli<R: RngCore + ?Sized>(order: usize, dim: usize, p: f64, rng: &mut R) -> Result<ObservationMask> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    let capacity = num_entries(order, dim);
    let offsets: Vec<usize> = (0..capacity).filter(|_| uniform(rng) < p).collect();
    Ok(ObservationMask::from_sorted_offsets(order, dim, offsets))
}

/// Observation set with target size `n` under the given model.
pub fn sample_mask<R: RngCore + ?Sized>(
    order: usize,
    dim: usize,
    n: usize,
    mode: SamplingMode,
    rng: &mut R,
) -> Result<ObservationMask> {
    match mode {
        SamplingMode::ExactN => sample_exact(order, dim, n, rng),
        SamplingMode::Bernoulli => {
            let capacity = num_entries(order, dim);
            if n > capacity {
                return Err(Error::OverfullMask { n, capacity });
            }
            sample_bernoulli(order, dim, n as f64 / capacity as f64, rng)
        }
    }
}
