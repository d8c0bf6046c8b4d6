//! Column-space estimation for partially revealed wide matrices, together
//! with the incoherence and coherence diagnostics used to describe when it
//! works.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::{orthonormality_defect, singular_values, SpectralProjector};
use crate::tensor::{frobenius_norm, max_abs, num_entries, unfold, Tensor};

fn check_fraction(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "(0, 1]",
        })
    }
}

/// Debiased second moment of a Bernoulli(`δ`)-revealed matrix
/// `Y = Π_E X`:
///
/// `B̂ = δ⁻¹ Π(YYᵀ) + δ⁻² Π_⊥(YYᵀ)`
///
/// A diagonal entry of `YYᵀ` collects each revealed entry once (probability
/// `δ`), an off-diagonal entry collects products of two independent reveals
/// (probability `δ²`), so `E[B̂] = XXᵀ`. Unrevealed entries are the zeros of
/// `y`.
pub fn bhat(y: &DMatrix<f64>, delta: f64) -> Result<DMatrix<f64>> {
    check_fraction("delta", delta)?;
    let mut b = y * y.transpose();
    let (diag_scale, off_scale) = (1.0 / delta, 1.0 / (delta * delta));
    let n = b.nrows();
    for j in 0..n {
        for i in 0..n {
            b[(i, j)] *= if i == j { diag_scale } else { off_scale };
        }
    }
    Ok(b)
}

/// `(λ, γ, ρ)` such that a `d₁ × d₂` matrix satisfies
///
/// - `d₁ max_i ‖Xᵀe_i‖² ≤ λ ‖X‖²_op`
/// - `d₂ max_j ‖Xe_j‖² ≤ ρ ‖X‖²_op`
/// - `d₁d₂ ‖X‖²_∞ ≤ λγρ ‖X‖²_op`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncoherenceParams {
    pub lambda: f64,
    pub gamma: f64,
    pub rho: f64,
}

/// The minimal incoherence triple: `λ` and `ρ` make the row and column
/// conditions tight, and `γ` then makes the entrywise condition tight.
pub fn incoherence_params(x: &DMatrix<f64>) -> Result<IncoherenceParams> {
    let (d1, d2) = x.shape();
    let op = singular_values(x).first().copied().unwrap_or(0.0);
    if op == 0.0 {
        return Err(Error::Zero);
    }
    let op2 = op * op;
    let max_row = x.row_iter().map(|r| r.norm_squared()).fold(0.0, f64::max);
    let max_col = x.column_iter().map(|c| c.norm_squared()).fold(0.0, f64::max);
    let lambda = d1 as f64 * max_row / op2;
    let rho = d2 as f64 * max_col / op2;
    let m = max_abs(x);
    let gamma = (d1 * d2) as f64 * m * m / (lambda * rho * op2);
    Ok(IncoherenceParams { lambda, gamma, rho })
}

/// `(m / r) · max_i ‖P e_i‖²` for the span of an orthonormal `m × r` basis.
pub fn coherence(basis: &DMatrix<f64>) -> Result<f64> {
    let (m, r) = basis.shape();
    if r == 0 {
        return Err(Error::Zero);
    }
    let dev = orthonormality_defect(basis);
    if dev > 1e-8 {
        return Err(Error::NotOrthonormal(dev));
    }
    let max_leverage = basis.row_iter().map(|row| row.norm_squared()).fold(0.0, f64::max);
    Ok(m as f64 / r as f64 * max_leverage)
}

/// `(R, α, μ)` of the balanced unfolding `X = unfold^{⌊k/2⌋×⌈k/2⌉}(T)`:
/// `rank X ≤ R`, `d^k ‖X‖²_∞ ≤ α ‖X‖²_F` and `μ ‖X‖²_F = R ‖X‖²_op`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnfoldingParams {
    pub big_r: usize,
    pub alpha: f64,
    pub mu: f64,
}

impl UnfoldingParams {
    /// `αR/μ`, the entrywise incoherence bound the unfolding inherits.
    pub fn varpi(&self) -> f64 {
        self.alpha * self.big_r as f64 / self.mu
    }
}

/// Tight unfolding parameters, with `R` the numerical rank at relative
/// tolerance `tol`.
pub fn unfolding_params(t: &Tensor, tol: f64) -> Result<UnfoldingParams> {
    if t.is_zero() {
        return Err(Error::Zero);
    }
    let k = t.order();
    if k < 2 {
        return Err(Error::UnsupportedOrder(k));
    }
    let x = unfold(t, k / 2, k - k / 2)?;
    let x = x.matrix();
    let sv = singular_values(x);
    let top = sv[0];
    let big_r = sv.iter().filter(|&&s| s > tol * top).count();
    let fro2 = {
        let f = frobenius_norm(x);
        f * f
    };
    let m = max_abs(x);
    let alpha = num_entries(k, t.dim()) as f64 * m * m / fro2;
    let mu = big_r as f64 * top * top / fro2;
    Ok(UnfoldingParams { big_r, alpha, mu })
}

/// Estimates a column of `X` from its revealed part `y` (zeros where
/// hidden) and an estimated column-space projector: `QQᵀy / δ'`.
pub fn column_complete(q: &SpectralProjector, y: &DVector<f64>, delta: f64) -> Result<DVector<f64>> {
    check_fraction("delta'", delta)?;
    if q.ambient_dim() != y.len() {
        return Err(Error::ShapeMismatch(alloc::format!(
            "projector on R^{} applied to a column of length {}",
            q.ambient_dim(),
            y.len()
        )));
    }
    Ok(q.apply(y) / delta)
}
