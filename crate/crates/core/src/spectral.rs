//! Dense symmetric eigendecomposition, SVD, thresholded spectral projectors
//! and the sin-θ subspace distance.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DMatrixView, DVector};

use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{num_entries, Tensor};

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    /// Largest eigenvalue magnitude, i.e. the operator norm.
    pub fn op_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Thin SVD `M = U diag(σ) Vᵀ` with `σ` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            scale = scale.max(m[(i, j)].abs());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Sorts eigen/singular pairs by descending value, reordering columns.
fn sort_descending(values: DVector<f64>, vectors: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = DMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]);
    (sorted_values, sorted_vectors)
}

/// Eigendecomposition of a symmetric matrix. The input is symmetrized as
/// `(M + Mᵀ)/2`; asymmetry above `1e-8` relative to the largest entry is
/// rejected.
pub fn sym_eig(m: &DMatrix<f64>) -> Result<SymEigen> {
    check_square(m)?;
    let skew = asymmetry(m);
    if skew > 1e-8 {
        return Err(Error::NotSymmetric(skew));
    }
    Ok(sym_eig_unchecked((m + m.transpose()) * 0.5))
}

fn sym_eig_unchecked(m: DMatrix<f64>) -> SymEigen {
    if m.nrows() == 0 {
        return SymEigen {
            values: Vec::new(),
            vectors: m,
        };
    }
    let eig = m.symmetric_eigen();
    let (values, vectors) = sort_descending(eig.eigenvalues, eig.eigenvectors);
    SymEigen { values, vectors }
}

pub fn svd(m: &DMatrix<f64>) -> Svd {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Svd {
            singular_values: Vec::new(),
            u: DMatrix::zeros(m.nrows(), 0),
            v: DMatrix::zeros(m.ncols(), 0),
        };
    }
    let dec = m.clone().svd(true, true);
    let u = dec.u.expect("requested U");
    let v = dec.v_t.expect("requested Vᵀ").transpose();
    let mut order: Vec<usize> = (0..k).collect();
    let s = &dec.singular_values;
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    Svd {
        singular_values: order.iter().map(|&i| s[i]).collect(),
        u: DMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]),
        v: DMatrix::from_fn(v.nrows(), k, |r, c| v[(r, order[c])]),
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Which spectrum a threshold is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumSide {
    /// Eigenvectors of a symmetric matrix with eigenvalue `≥ λ`.
    #[default]
    Eigen,
    /// Left singular vectors with singular value `≥ λ`. Computed from the
    /// eigendecomposition of `M Mᵀ`, whose eigenvalues are `σ²`.
    LeftSingular,
    /// Eigenvectors of `(M + Mᵀ)/2` with eigenvalue `≥ λ`, for nearly
    /// symmetric inputs.
    SymmetrizedEigen,
}

/// Orthogonal projection onto the span of orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProjector {
    basis: DMatrix<f64>,
    threshold: f64,
}

impl SpectralProjector {
    /// Wraps an orthonormal basis (`m × ρ`), checked to `1e-8`.
    pub fn new(basis: DMatrix<f64>, threshold: f64) -> Result<Self> {
        let dev = orthonormality_defect(&basis);
        if dev > 1e-8 {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(SpectralProjector { basis, threshold })
    }

    /// Rank-zero projector on `R^m`.
    pub fn zero(ambient_dim: usize) -> Self {
        SpectralProjector {
            basis: DMatrix::zeros(ambient_dim, 0),
            threshold: f64::INFINITY,
        }
    }

    pub fn identity(ambient_dim: usize) -> Self {
        SpectralProjector {
            basis: DMatrix::identity(ambient_dim, ambient_dim),
            threshold: 0.0,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// The threshold that selected this subspace.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// The projector matrix `basis · basisᵀ`.
    pub fn matrix(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }
}

/// `‖BᵀB − I‖_max`.
pub(crate) fn orthonormality_defect(basis: &DMatrix<f64>) -> f64 {
    let gram = basis.transpose() * basis;
    let mut dev: f64 = 0.0;
    for j in 0..gram.ncols() {
        for i in 0..gram.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - target).abs());
        }
    }
    dev
}

/// A spectrum sorted in descending order with its vectors, from which
/// projectors at any threshold can be cut.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues, or singular values for [`SpectrumSide::LeftSingular`].
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    /// Largest magnitude in the spectrum; the operator norm of the source
    /// matrix for the eigen and left-singular sides.
    pub fn op_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Projector onto the vectors whose value is `≥ threshold`.
    pub fn projector(&self, threshold: f64) -> SpectralProjector {
        let keep = self.values.iter().take_while(|&&v| v >= threshold).count();
        SpectralProjector {
            basis: self.vectors.columns(0, keep).into_owned(),
            threshold,
        }
    }
}

/// Decomposes `m` on the requested side.
pub fn spectrum(m: &DMatrix<f64>, side: SpectrumSide) -> Result<Spectrum> {
    Ok(match side {
        SpectrumSide::Eigen => {
            let e = sym_eig(m)?;
            Spectrum {
                values: e.values,
                vectors: e.vectors,
            }
        }
        SpectrumSide::SymmetrizedEigen => {
            check_square(m)?;
            let e = sym_eig_unchecked((m + m.transpose()) * 0.5);
            Spectrum {
                values: e.values,
                vectors: e.vectors,
            }
        }
        SpectrumSide::LeftSingular => {
            let e = sym_eig_unchecked(m * m.transpose());
            Spectrum {
                values: e.values.iter().map(|&mu| math::sqrt(mu.max(0.0))).collect(),
                vectors: e.vectors,
            }
        }
    })
}

/// Projector onto the eigen/singular vectors whose value is `≥ threshold`.
pub fn threshold_projector(m: &DMatrix<f64>, threshold: f64, side: SpectrumSide) -> Result<SpectralProjector> {
    if !(threshold >= 0.0) {
        return Err(Error::OutOfRange {
            name: "threshold",
            value: threshold,
            range: "[0, inf)",
        });
    }
    Ok(spectrum(m, side)?.projector(threshold))
}

/// `‖(I − UUᵀ) PPᵀ‖_op` for orthonormal bases `P` and `U`.
pub fn sin_theta(p: &SpectralProjector, u: &SpectralProjector) -> Result<f64> {
    if p.ambient_dim() != u.ambient_dim() {
        return Err(Error::ShapeMismatch(format!(
            "subspaces of R^{} and R^{}",
            p.ambient_dim(),
            u.ambient_dim()
        )));
    }
    if p.rank() == 0 {
        return Ok(0.0);
    }
    // (I − UUᵀ)PPᵀ has the same nonzero singular values as (I − UUᵀ)P.
    let residual = p.basis() - u.basis() * (u.basis().transpose() * p.basis());
    let s = singular_values(&residual).first().copied().unwrap_or(0.0);
    Ok(s.clamp(0.0, 1.0))
}

/// How a projector on `R^{d^a}` is lifted to `(R^d)^{⊗k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionPattern {
    /// `Q ⊗ Q ⊗ Q` with `Q` on `R^d`, for `k = 3`.
    Triple,
    /// `Q ⊗ Q` with `Q` on `R^{d^{k/2}}`, for even `k ≥ 4`.
    Halves,
    /// `Q ⊗ Q ⊗ I_d` with `Q` on `R^{d^{⌊k/2⌋}}`, for odd `k ≥ 5`.
    HalvesThenIdentity,
    /// `Q ⊗ I_d` with `Q` on `R^{d^2}`, for `k = 3`.
    LeadingPair,
}

impl ProjectionPattern {
    /// The lift used by the unfolding estimator for order `k`.
    pub fn for_unfolding(order: usize) -> Result<Self> {
        match order {
            3 => Ok(ProjectionPattern::Triple),
            k if k >= 4 && k % 2 == 0 => Ok(ProjectionPattern::Halves),
            k if k >= 5 => Ok(ProjectionPattern::HalvesThenIdentity),
            k => Err(Error::UnsupportedOrder(k)),
        }
    }

    /// Number of tensor modes each copy of `Q` acts on.
    pub fn group_size(self, order: usize) -> usize {
        match self {
            ProjectionPattern::Triple => 1,
            ProjectionPattern::LeadingPair => 2,
            ProjectionPattern::Halves | ProjectionPattern::HalvesThenIdentity => order / 2,
        }
    }

    /// First mode of every group `Q` is applied to.
    fn starts(self, order: usize) -> Vec<usize> {
        match self {
            ProjectionPattern::Triple => alloc::vec![0, 1, 2],
            ProjectionPattern::LeadingPair => alloc::vec![0],
            ProjectionPattern::Halves | ProjectionPattern::HalvesThenIdentity => {
                alloc::vec![0, order / 2]
            }
        }
    }

    fn accepts(self, order: usize) -> bool {
        match self {
            ProjectionPattern::Triple | ProjectionPattern::LeadingPair => order == 3,
            ProjectionPattern::Halves => order >= 4 && order % 2 == 0,
            ProjectionPattern::HalvesThenIdentity => order >= 5 && order % 2 == 1,
        }
    }
}

/// Applies the lifted projection `𝒬` to `t` by successive mode
/// multiplications.
pub fn apply_mode_projection(t: &Tensor, q: &SpectralProjector, pattern: ProjectionPattern) -> Result<Tensor> {
    let (order, d) = (t.order(), t.dim());
    if !pattern.accepts(order) {
        return Err(Error::ShapeMismatch(format!("{pattern:?} does not apply to order {order}")));
    }
    let group = pattern.group_size(order);
    let block = num_entries(group, d);
    if q.ambient_dim() != block {
        return Err(Error::ShapeMismatch(format!(
            "{pattern:?} on d={d} needs a projector on R^{block}, got R^{}",
            q.ambient_dim()
        )));
    }
    if q.rank() == 0 {
        return Ok(Tensor::zeros(order, d).with_symmetric(false));
    }
    let mut values = t.values().to_vec();
    for start in pattern.starts(order) {
        values = project_modes(&values, order, d, start, group, q.basis());
    }
    let symmetric = t.is_symmetric() && pattern == ProjectionPattern::Triple;
    Ok(Tensor::from_raw(order, d, values).with_symmetric(symmetric))
}

/// Multiplies the `group` consecutive modes starting at `start` by
/// `basis · basisᵀ`.
fn project_modes(values: &[f64], order: usize, d: usize, start: usize, group: usize, basis: &DMatrix<f64>) -> Vec<f64> {
    let left = num_entries(start, d);
    let mid = num_entries(group, d);
    let right = num_entries(order - start - group, d);
    let mut out = Vec::with_capacity(values.len());
    for l in 0..left {
        // Row-major mid × right is column-major right × mid.
        let chunk = &values[l * mid * right..(l + 1) * mid * right];
        let block_t = DMatrixView::from_slice(chunk, right, mid);
        let coords = block_t * basis;
        let projected_t = coords * basis.transpose();
        out.extend_from_slice(projected_t.as_slice());
    }
    out
}
