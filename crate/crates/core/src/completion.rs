//! Output of the completion estimators.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::tensor::Tensor;

/// Conditions under which the estimators' guarantees are not known to hold.
/// They are reported, never enforced.
#[derive(Debug, Clone, PartialEq)]
pub enum RegimeWarning {
    /// Fewer samples than the guaranteed window requires.
    BelowSampleWindow { n: f64, lower: f64 },
    /// More samples than the window covers.
    AboveSampleWindow { n: f64, upper: f64 },
    /// Unfolding rank above `r_max(d; k)`.
    RankAboveMax { rank: usize, r_max: f64 },
    /// The exact-size triple split could not hit every target size.
    SplitRounding { max_deviation: f64 },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeWarning::BelowSampleWindow { n, lower } => {
                write!(f, "sample size {n} below the guaranteed window (lower end {lower:.6e})")
            }
            RegimeWarning::AboveSampleWindow { n, upper } => {
                write!(f, "sample size {n} above the guaranteed window (upper end {upper:.6e})")
            }
            RegimeWarning::RankAboveMax { rank, r_max } => {
                write!(f, "unfolding rank {rank} exceeds r_max = {r_max:.6}")
            }
            RegimeWarning::SplitRounding { max_deviation } => {
                write!(f, "split sizes deviate from their targets by up to {max_deviation:.6}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Number of observed entries.
    pub n: usize,
    /// `δ₁ = n / (2d^k)` for the unfolding estimator, `δ` for contraction.
    pub delta: f64,
    /// `δ₂ = δ₁ / (1 − δ₁)`; unfolding estimator only.
    pub delta2: Option<f64>,
    /// `‖B‖_op` (unfolding) or `‖W‖_op` (contraction).
    pub spectrum_op_norm: f64,
    pub lambda_star: f64,
    pub rank_q: usize,
    pub warnings: Vec<RegimeWarning>,
    /// Wall time, filled in by callers that can measure it.
    pub elapsed: Option<Duration>,
}

impl Diagnostics {
    /// `key=value` pairs in a fixed order.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        use alloc::format;
        let mut kv = alloc::vec![
            ("n", format!("{}", self.n)),
            ("delta", format!("{:.16e}", self.delta)),
        ];
        if let Some(d2) = self.delta2 {
            kv.push(("delta2", format!("{d2:.16e}")));
        }
        kv.push(("spectrum_op_norm", format!("{:.16e}", self.spectrum_op_norm)));
        kv.push(("lambda_star", format!("{:.16e}", self.lambda_star)));
        kv.push(("rank_q", format!("{}", self.rank_q)));
        if let Some(e) = self.elapsed {
            kv.push(("elapsed_secs", format!("{:.6}", e.as_secs_f64())));
        }
        for w in &self.warnings {
            kv.push(("warning", format!("{w}")));
        }
        kv
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResult {
    pub estimate: Tensor,
    pub diagnostics: Diagnostics,
}
