//! Completion of symmetric order-`k` tensors through their balanced
//! unfolding.
//!
//! The observed entries are split in two halves. The first half gives a
//! debiased Gram matrix `B` of the `d^a × d^b` unfolding (`a = ⌊k/2⌋`), whose
//! top eigenvectors estimate the column space `Q` of the unfolding. The
//! second half debiases the observation, `T̂ = Y₁ + Y₂/δ₂`, which is then
//! projected onto the tensor-product subspace built from `Q`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::RngCore;

use crate::completion::{CompletionResult, Diagnostics, RegimeWarning};
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::{bhat, UnfoldingParams};
use crate::random::{stream_rng, uniform};
use crate::sampling::SamplingMode;
use crate::spectral::{apply_mode_projection, spectrum, ProjectionPattern, SpectralProjector, SpectrumSide};
use crate::tensor::{num_entries, unfold, ObservationMask, PartialTensor, Tensor};

/// How the eigenvalue threshold `λ⋆` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnfoldThreshold {
    Fixed(f64),
    /// [`lambda_star_theorem1`]; needs [`UnfoldConfig::params`].
    Theorem,
    /// `factor · (d^{3/2}/n)^{2/3} ‖B‖_op`, meant for `k = 3`.
    Simulation { factor: f64 },
}

impl UnfoldThreshold {
    pub const SIMULATION: UnfoldThreshold = UnfoldThreshold::Simulation { factor: 3.0 };
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldConfig {
    pub threshold: UnfoldThreshold,
    /// Unfolding parameters of the ground truth, when known. Required by
    /// [`UnfoldThreshold::Theorem`]; also enables the regime checks.
    pub params: Option<UnfoldingParams>,
    /// Slack `t ≥ 1` of the Bernoulli-model window
    /// `32(k log d)⁴ t^{1/2} ϖ / d^{k/2} ≤ δ ≤ t ϖ / d^a`. Without it the
    /// fixed-size window in `n` is checked instead.
    pub slack: Option<f64>,
    /// How the observed set is split in two.
    pub split: SamplingMode,
    pub seed: u64,
    pub stream: u64,
}

impl Default for UnfoldConfig {
    fn default() -> Self {
        UnfoldConfig {
            threshold: UnfoldThreshold::SIMULATION,
            params: None,
            slack: None,
            split: SamplingMode::ExactN,
            seed: 0,
            stream: 0,
        }
    }
}

impl UnfoldConfig {
    fn validate(&self) -> Result<()> {
        match self.threshold {
            UnfoldThreshold::Fixed(l) if !(l >= 0.0) => {
                return Err(Error::Config(alloc::format!("fixed threshold {l} must be non-negative")));
            }
            UnfoldThreshold::Simulation { factor } if !(factor > 0.0) => {
                return Err(Error::Config(alloc::format!("simulation factor {factor} must be positive")));
            }
            UnfoldThreshold::Theorem if self.params.is_none() => {
                return Err(Error::Config("the theorem threshold needs unfolding parameters".into()));
            }
            _ => {}
        }
        if let Some(t) = self.slack {
            if !(t >= 1.0) {
                return Err(Error::Config(alloc::format!("slack t = {t} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// The two halves of the observed set.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub first: ObservationMask,
    pub second: ObservationMask,
    /// `δ₁ = n / (2d^k)`.
    pub delta1: f64,
}

/// Splits `E` into disjoint `E₁ ∪ E₂ = E`.
///
/// With [`SamplingMode::ExactN`], `E₁` is a uniform subset of size `⌈n/2⌉`.
/// With [`SamplingMode::Bernoulli`], each entry joins `E₁` independently with
/// probability 1/2.
pub fn split_two<R: RngCore + ?Sized>(mask: &ObservationMask, mode: SamplingMode, rng: &mut R) -> Result<SplitPair> {
    let n = mask.len();
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    let offsets = mask.offsets();
    let mut in_first = alloc::vec![false; n];
    match mode {
        SamplingMode::ExactN => {
            for pos in rand::seq::index::sample(rng, n, n.div_ceil(2)) {
                in_first[pos] = true;
            }
        }
        SamplingMode::Bernoulli => {
            for flag in in_first.iter_mut() {
                *flag = uniform(rng) < 0.5;
            }
        }
    }
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for (&o, &f) in offsets.iter().zip(&in_first) {
        if f {
            first.push(o);
        } else {
            second.push(o);
        }
    }
    let (k, d) = (mask.order(), mask.dim());
    Ok(SplitPair {
        first: ObservationMask::from_sorted_offsets(k, d, first),
        second: ObservationMask::from_sorted_offsets(k, d, second),
        delta1: n as f64 / (2.0 * num_entries(k, d) as f64),
    })
}

/// `B = δ₁⁻¹ Π(ZZᵀ) + δ₁⁻² Π_⊥(ZZᵀ)` with `Z` the `⌊k/2⌋ × ⌈k/2⌉` unfolding
/// of `Y₁`.
pub fn build_b(y1: &Tensor, delta1: f64) -> Result<DMatrix<f64>> {
    let k = y1.order();
    if k < 2 {
        return Err(Error::UnsupportedOrder(k));
    }
    let z = unfold(y1, k / 2, k - k / 2)?;
    bhat(z.matrix(), delta1)
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "(0, inf)",
        })
    }
}

/// `λ⋆ = 4 (k ln d)⁸ (α R μ^{1/2} / (n / d^{k/2}))^{2/3} ‖B‖_op`.
pub fn lambda_star_theorem1(params: &UnfoldingParams, n: f64, d: usize, k: usize, b_op_norm: f64) -> Result<f64> {
    positive("alpha", params.alpha)?;
    positive("mu", params.mu)?;
    positive("R", params.big_r as f64)?;
    positive("n", n)?;
    positive("k", k as f64)?;
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "[2, inf)",
        });
    }
    if !(b_op_norm >= 0.0) {
        return Err(Error::OutOfRange {
            name: "|B|_op",
            value: b_op_norm,
            range: "[0, inf)",
        });
    }
    let klog = k as f64 * math::ln(d as f64);
    let ratio = params.alpha * params.big_r as f64 * math::sqrt(params.mu) / (n / math::powf(d as f64, k as f64 / 2.0));
    Ok(4.0 * math::powf(klog, 8.0) * math::powf(ratio, 2.0 / 3.0) * b_op_norm)
}

/// `λ⋆ = 3 (d^{3/2} / n)^{2/3} ‖B‖_op`.
pub fn lambda_star_simulation(n: f64, d: usize, b_op_norm: f64) -> Result<f64> {
    lambda_star_simulation_with_factor(3.0, n, d, b_op_norm)
}

/// [`lambda_star_simulation`] with a custom leading factor.
pub fn lambda_star_simulation_with_factor(factor: f64, n: f64, d: usize, b_op_norm: f64) -> Result<f64> {
    positive("n", n)?;
    positive("d", d as f64)?;
    Ok(factor * math::powf(math::powf(d as f64, 1.5) / n, 2.0 / 3.0) * b_op_norm)
}

/// Largest unfolding rank covered by the guarantee: `d^{3/4}` for `k = 3`,
/// `d^{k/2}` for even `k ≥ 4`, `d^{k/2 − 1}` for odd `k ≥ 5`.
pub fn r_max(d: usize, k: usize) -> f64 {
    let d = d as f64;
    match k {
        3 => math::powf(d, 0.75),
        k if k % 2 == 0 => math::powf(d, k as f64 / 2.0),
        k => math::powf(d, k as f64 / 2.0 - 1.0),
    }
}

/// Checks `n` and `R` against the window in which the threshold rule is
/// guaranteed to work.
///
/// Without `slack`, the fixed-size window is
/// `32 (k ln d)¹² α R μ^{1/2} d^{k/2} ≤ n ≤ (k ln d)¹⁶ α R μ² d^b`.
/// With slack `t`, the Bernoulli window
/// `32 (k ln d)⁴ t^{1/2} ϖ / d^{k/2} ≤ δ ≤ t ϖ / d^a` is used, where
/// `δ = n / d^k` and `ϖ = α R / μ`.
pub fn regime_warnings(params: &UnfoldingParams, n: usize, d: usize, k: usize, slack: Option<f64>) -> Vec<RegimeWarning> {
    let mut out = Vec::new();
    let (a, b) = (k / 2, k - k / 2);
    let df = d as f64;
    let klog = k as f64 * math::ln(df);
    let half_k = math::powf(df, k as f64 / 2.0);
    let ar = params.alpha * params.big_r as f64;
    let (lower, upper) = match slack {
        None => (
            32.0 * math::powf(klog, 12.0) * ar * math::sqrt(params.mu) * half_k,
            math::powf(klog, 16.0) * ar * params.mu * params.mu * math::powf(df, b as f64),
        ),
        Some(t) => {
            let varpi = params.varpi();
            let total = num_entries(k, d) as f64;
            (
                32.0 * math::powf(klog, 4.0) * math::sqrt(t) * varpi / half_k * total,
                t * varpi / math::powf(df, a as f64) * total,
            )
        }
    };
    let nf = n as f64;
    if nf < lower {
        out.push(RegimeWarning::BelowSampleWindow { n: nf, lower });
    }
    if nf > upper {
        out.push(RegimeWarning::AboveSampleWindow { n: nf, upper });
    }
    let rmax = r_max(d, k);
    if params.big_r as f64 > rmax {
        out.push(RegimeWarning::RankAboveMax {
            rank: params.big_r,
            r_max: rmax,
        });
    }
    out
}

/// `𝒬(Y₁ + Y₂/δ₂)` with the lift of `Q` appropriate for order `k`.
pub fn denoise(y1: &Tensor, y2: &Tensor, delta2: f64, q: &SpectralProjector) -> Result<Tensor> {
    positive("delta2", delta2)?;
    let pattern = ProjectionPattern::for_unfolding(y1.order())?;
    let t_hat = y1.add_scaled(y2, 1.0 / delta2)?;
    apply_mode_projection(&t_hat, q, pattern)
}

/// Runs the unfolding estimator on `Π_E T`.
pub fn complete_unfold(y: &PartialTensor, cfg: &UnfoldConfig) -> Result<CompletionResult> {
    let (k, d) = (y.order(), y.dim());
    if k < 3 {
        return Err(Error::UnsupportedOrder(k));
    }
    if y.mask().is_empty() {
        return Err(Error::EmptyMask);
    }
    cfg.validate()?;

    let mut rng = stream_rng(cfg.seed, cfg.stream);
    let split = split_two(y.mask(), cfg.split, &mut rng)?;
    let y1 = y.restrict(&split.first)?;
    let y2 = y.restrict(&split.second)?;
    let delta1 = split.delta1;

    let b = build_b(y1.tensor(), delta1)?;
    let spec = spectrum(&b, SpectrumSide::Eigen)?;
    let b_op = spec.op_norm();
    let n = y.mask().len();

    let lambda_star = match cfg.threshold {
        UnfoldThreshold::Fixed(l) => l,
        UnfoldThreshold::Theorem => {
            let params = cfg.params.as_ref().expect("validated");
            lambda_star_theorem1(params, n as f64, d, k, b_op)?
        }
        UnfoldThreshold::Simulation { factor } => lambda_star_simulation_with_factor(factor, n as f64, d, b_op)?,
    };
    // An all-zero B carries no directions to keep.
    let q = if b_op == 0.0 {
        SpectralProjector::zero(b.nrows())
    } else {
        spec.projector(lambda_star)
    };

    let delta2 = delta1 / (1.0 - delta1);
    let estimate = denoise(y1.tensor(), y2.tensor(), delta2, &q)?;

    let warnings = cfg
        .params
        .as_ref()
        .map(|p| regime_warnings(p, n, d, k, cfg.slack))
        .unwrap_or_default();

    Ok(CompletionResult {
        estimate,
        diagnostics: Diagnostics {
            n,
            delta: delta1,
            delta2: Some(delta2),
            spectrum_op_norm: b_op,
            lambda_star,
            rank_q: q.rank(),
            warnings,
            elapsed: None,
        },
    })
}
