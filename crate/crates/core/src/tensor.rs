//! Dense cubic tensors, observation masks and unfoldings.
//!
//! A tensor of order `k` and dimension `d` stores its `d^k` entries in
//! row-major order (last index fastest). Indices are 0-based in memory; the
//! file formats in the companion crate shift them to 1-based.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::math;

/// `d^k`, panicking on overflow.
pub fn num_entries(order: usize, dim: usize) -> usize {
    let mut n: usize = 1;
    for _ in 0..order {
        n = n.checked_mul(dim).expect("tensor size overflows usize");
    }
    n
}

/// Row-major offset of a multi-index.
#[inline]
pub fn offset_of(index: &[usize], dim: usize) -> usize {
    index.iter().fold(0, |acc, &i| acc * dim + i)
}

/// Inverse of [`offset_of`].
pub fn index_of(mut offset: usize, order: usize, dim: usize) -> Vec<usize> {
    let mut index = vec![0; order];
    for slot in index.iter_mut().rev() {
        *slot = offset % dim;
        offset /= dim;
    }
    index
}

/// Rearranges `v` into the next lexicographic permutation; false once `v` is
/// the last one. Repeated values yield each distinct arrangement once.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Calls `f(sorted, offsets)` once per orbit of `[d]^k` under index
/// permutation: `sorted` is the non-decreasing representative and `offsets`
/// lists the offsets of every distinct permutation of it.
pub(crate) fn for_each_symmetric_class(
    order: usize,
    dim: usize,
    mut f: impl FnMut(&[usize], &[usize]),
) {
    if dim == 0 {
        return;
    }
    let mut sorted = vec![0usize; order];
    let mut perm = vec![0usize; order];
    let mut offsets = Vec::new();
    loop {
        offsets.clear();
        perm.copy_from_slice(&sorted);
        loop {
            offsets.push(offset_of(&perm, dim));
            if !next_permutation(&mut perm) {
                break;
            }
        }
        f(&sorted, &offsets);

        // Next non-decreasing tuple.
        let mut pos = order;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if sorted[pos] + 1 < dim {
                let v = sorted[pos] + 1;
                for slot in sorted[pos..].iter_mut() {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// Dense order-`k` tensor on `(R^d)^{⊗k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    values: Vec<f64>,
    symmetric: bool,
}

impl Tensor {
    pub fn zeros(order: usize, dim: usize) -> Self {
        Tensor {
            order,
            dim,
            values: vec![0.0; num_entries(order, dim)],
            symmetric: true,
        }
    }

    pub fn from_values(order: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if order == 0 || dim == 0 {
            return Err(Error::ShapeMismatch(format!(
                "order and dimension must be positive (got k={order}, d={dim})"
            )));
        }
        let expected = num_entries(order, dim);
        if values.len() != expected {
            return Err(Error::ValueCount {
                order,
                dim,
                expected,
                got: values.len(),
            });
        }
        Ok(Tensor {
            order,
            dim,
            values,
            symmetric: false,
        })
    }

    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let n = num_entries(order, dim);
        let mut index = vec![0usize; order];
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(f(&index));
            for pos in (0..order).rev() {
                index[pos] += 1;
                if index[pos] < dim {
                    break;
                }
                index[pos] = 0;
            }
        }
        Tensor {
            order,
            dim,
            values,
            symmetric: false,
        }
    }

    /// Tensor with a single unit entry.
    pub fn indicator(order: usize, dim: usize, index: &[usize]) -> Result<Self> {
        check_index(index, order, dim)?;
        let mut t = Tensor::zeros(order, dim);
        t.values[offset_of(index, dim)] = 1.0;
        t.symmetric = index.windows(2).all(|w| w[0] == w[1]);
        Ok(t)
    }

    /// Builds a tensor whose entries are constant on permutation orbits:
    /// `f` is called once with the sorted representative of each orbit.
    pub fn symmetric_from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Tensor::zeros(order, dim);
        for_each_symmetric_class(order, dim, |sorted, offsets| {
            let v = f(sorted);
            for &o in offsets {
                t.values[o] = v;
            }
        });
        t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Whether the tensor was constructed to be permutation symmetric.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Exhaustive check that every entry matches all permutations of its index.
    pub fn check_symmetry(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut ok = true;
        for_each_symmetric_class(self.order, self.dim, |_, offsets| {
            let v0 = self.values[offsets[0]];
            if offsets[1..]
                .iter()
                .any(|&o| (self.values[o] - v0).abs() > tol * scale)
            {
                ok = false;
            }
        });
        ok
    }

    /// Averages every entry over the permutations of its index.
    pub fn symmetrize(&self) -> Tensor {
        let mut out = Tensor::zeros(self.order, self.dim);
        for_each_symmetric_class(self.order, self.dim, |_, offsets| {
            let mean = offsets.iter().map(|&o| self.values[o]).sum::<f64>() / offsets.len() as f64;
            for &o in offsets {
                out.values[o] = mean;
            }
        });
        out
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        debug_assert_eq!(index.len(), self.order);
        self.values[offset_of(index, self.dim)]
    }

    pub fn frobenius(&self) -> f64 {
        math::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Tensor {
        Tensor {
            order: self.order,
            dim: self.dim,
            values: self.values.iter().map(|v| v * c).collect(),
            symmetric: self.symmetric,
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Tensor, c: f64) -> Result<Tensor> {
        self.check_same_shape(other)?;
        Ok(Tensor {
            order: self.order,
            dim: self.dim,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + c * y)
                .collect(),
            symmetric: self.symmetric && other.symmetric,
        })
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.add_scaled(other, -1.0)
    }

    pub(crate) fn check_same_shape(&self, other: &Tensor) -> Result<()> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "(k={}, d={}) vs (k={}, d={})",
                self.order, self.dim, other.order, other.dim
            )));
        }
        Ok(())
    }

    pub(crate) fn with_symmetric(mut self, symmetric: bool) -> Tensor {
        self.symmetric = symmetric;
        self
    }

    pub(crate) fn from_raw(order: usize, dim: usize, values: Vec<f64>) -> Tensor {
        debug_assert_eq!(values.len(), num_entries(order, dim));
        Tensor {
            order,
            dim,
            values,
            symmetric: false,
        }
    }
}

fn check_index(index: &[usize], order: usize, dim: usize) -> Result<()> {
    if index.len() != order {
        return Err(Error::ShapeMismatch(format!(
            "index of length {} for an order-{order} tensor",
            index.len()
        )));
    }
    if index.iter().any(|&i| i >= dim) {
        return Err(Error::IndexOutOfRange {
            index: index.to_vec(),
            dim,
        });
    }
    Ok(())
}

/// A set `E ⊆ [d]^k` of revealed positions, stored as sorted row-major offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    order: usize,
    dim: usize,
    offsets: Vec<usize>,
}

impl ObservationMask {
    pub fn empty(order: usize, dim: usize) -> Self {
        ObservationMask {
            order,
            dim,
            offsets: Vec::new(),
        }
    }

    pub fn full(order: usize, dim: usize) -> Self {
        ObservationMask {
            order,
            dim,
            offsets: (0..num_entries(order, dim)).collect(),
        }
    }

    /// Builds a mask from 0-based multi-indices. Duplicates are rejected.
    pub fn from_indices<I>(order: usize, dim: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: AsRef<[usize]>,
    {
        let mut offsets = Vec::new();
        for index in indices {
            let index = index.as_ref();
            check_index(index, order, dim)?;
            offsets.push(offset_of(index, dim));
        }
        Self::from_offsets(order, dim, offsets)
    }

    pub fn from_offsets(order: usize, dim: usize, mut offsets: Vec<usize>) -> Result<Self> {
        let capacity = num_entries(order, dim);
        offsets.sort_unstable();
        if let Some(&last) = offsets.last() {
            if last >= capacity {
                return Err(Error::IndexOutOfRange {
                    index: index_of(last, order, dim),
                    dim,
                });
            }
        }
        if let Some(w) = offsets.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEntry(index_of(w[0], order, dim)));
        }
        Ok(ObservationMask {
            order,
            dim,
            offsets,
        })
    }

    pub(crate) fn from_sorted_offsets(order: usize, dim: usize, offsets: Vec<usize>) -> Self {
        debug_assert!(offsets.windows(2).all(|w| w[0] < w[1]));
        ObservationMask {
            order,
            dim,
            offsets,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of revealed entries `n = |E|`.
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// `n / d^k`.
    pub fn fraction(&self) -> f64 {
        self.len() as f64 / num_entries(self.order, self.dim) as f64
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.offsets
            .iter()
            .map(move |&o| index_of(o, self.order, self.dim))
    }

    pub fn contains(&self, index: &[usize]) -> bool {
        index.len() == self.order
            && index.iter().all(|&i| i < self.dim)
            && self.contains_offset(offset_of(index, self.dim))
    }

    pub fn contains_offset(&self, offset: usize) -> bool {
        self.offsets.binary_search(&offset).is_ok()
    }

    pub fn is_subset_of(&self, other: &ObservationMask) -> bool {
        self.order == other.order
            && self.dim == other.dim
            && self.offsets.iter().all(|&o| other.contains_offset(o))
    }
}

/// A tensor that is zero outside its observation mask: `Π_E T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialTensor {
    tensor: Tensor,
    mask: ObservationMask,
}

impl PartialTensor {
    /// Builds `Π_E T` from explicit `(index, value)` observations.
    pub fn from_observations<I, V>(order: usize, dim: usize, observations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, f64)>,
        V: AsRef<[usize]>,
    {
        let mut offsets = Vec::new();
        let mut tensor = Tensor::zeros(order, dim).with_symmetric(false);
        for (index, value) in observations {
            let index = index.as_ref();
            check_index(index, order, dim)?;
            let o = offset_of(index, dim);
            offsets.push(o);
            tensor.values[o] = value;
        }
        let mask = ObservationMask::from_offsets(order, dim, offsets)?;
        Ok(PartialTensor { tensor, mask })
    }

    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn mask(&self) -> &ObservationMask {
        &self.mask
    }

    pub fn order(&self) -> usize {
        self.tensor.order
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim
    }

    pub fn into_parts(self) -> (Tensor, ObservationMask) {
        (self.tensor, self.mask)
    }

    /// Observed `(index, value)` pairs in row-major order.
    pub fn observations(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.mask
            .offsets
            .iter()
            .map(move |&o| (index_of(o, self.order(), self.dim()), self.tensor.values[o]))
    }

    /// Restricts the observation to a sub-mask.
    pub fn restrict(&self, sub: &ObservationMask) -> Result<PartialTensor> {
        if !sub.is_subset_of(&self.mask) {
            return Err(Error::ShapeMismatch(
                "restriction mask is not contained in the observed set".into(),
            ));
        }
        project_mask(&self.tensor, sub)
    }
}

/// `Π_E T`: keeps the entries on `E` and zeroes the rest.
pub fn project_mask(t: &Tensor, mask: &ObservationMask) -> Result<PartialTensor> {
    if t.order != mask.order || t.dim != mask.dim {
        return Err(Error::ShapeMismatch(format!(
            "tensor (k={}, d={}) vs mask (k={}, d={})",
            t.order, t.dim, mask.order, mask.dim
        )));
    }
    let mut values = vec![0.0; t.len()];
    for &o in &mask.offsets {
        values[o] = t.values[o];
    }
    Ok(PartialTensor {
        tensor: Tensor::from_raw(t.order, t.dim, values),
        mask: mask.clone(),
    })
}

/// A `d^a × d^b` matricization that remembers how to fold back.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedMatrix {
    rows_modes: usize,
    cols_modes: usize,
    dim: usize,
    matrix: DMatrix<f64>,
}

impl UnfoldedMatrix {
    pub fn new(matrix: DMatrix<f64>, rows_modes: usize, cols_modes: usize, dim: usize) -> Result<Self> {
        let order = rows_modes + cols_modes;
        if rows_modes == 0 || cols_modes == 0 {
            return Err(Error::InvalidUnfolding {
                rows_modes,
                cols_modes,
                order,
            });
        }
        let (r, c) = (num_entries(rows_modes, dim), num_entries(cols_modes, dim));
        if matrix.nrows() != r || matrix.ncols() != c {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix for a {rows_modes}x{cols_modes} unfolding with d={dim} ({r}x{c})",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(UnfoldedMatrix {
            rows_modes,
            cols_modes,
            dim,
            matrix,
        })
    }

    pub fn rows_modes(&self) -> usize {
        self.rows_modes
    }

    pub fn cols_modes(&self) -> usize {
        self.cols_modes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn refold(&self) -> Tensor {
        refold(self)
    }
}

/// `X[i, l] = T[(i, l)]` with `i` running over the first `a` indices and `l`
/// over the last `b`, both row-major.
pub fn unfold(t: &Tensor, rows_modes: usize, cols_modes: usize) -> Result<UnfoldedMatrix> {
    if rows_modes == 0 || cols_modes == 0 || rows_modes + cols_modes != t.order {
        return Err(Error::InvalidUnfolding {
            rows_modes,
            cols_modes,
            order: t.order,
        });
    }
    let rows = num_entries(rows_modes, t.dim);
    let cols = num_entries(cols_modes, t.dim);
    Ok(UnfoldedMatrix {
        rows_modes,
        cols_modes,
        dim: t.dim,
        matrix: DMatrix::from_row_slice(rows, cols, &t.values),
    })
}

pub fn refold(x: &UnfoldedMatrix) -> Tensor {
    let m = &x.matrix;
    let mut values = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        values.extend(m.row(i).iter().copied());
    }
    Tensor::from_raw(x.rows_modes + x.cols_modes, x.dim, values)
}

/// Mode-`mode` unfolding: a `d × d^{k-1}` matrix whose row is the `mode`-th
/// index and whose column enumerates the remaining indices row-major.
pub fn mode_unfolding(t: &Tensor, mode: usize) -> Result<DMatrix<f64>> {
    if mode >= t.order {
        return Err(Error::ShapeMismatch(format!(
            "mode {mode} of an order-{} tensor",
            t.order
        )));
    }
    let d = t.dim;
    // offset = (left * d + i) * right + r
    let right = num_entries(t.order - mode - 1, d);
    let left = num_entries(mode, d);
    let mut m = DMatrix::zeros(d, left * right);
    for l in 0..left {
        for i in 0..d {
            let base = (l * d + i) * right;
            for r in 0..right {
                m[(i, l * right + r)] = t.values[base + r];
            }
        }
    }
    Ok(m)
}

/// Splits a square matrix into its diagonal part `Π(M)` and off-diagonal
/// part `Π_⊥(M)`.
pub fn diag_split(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let mut diag = DMatrix::zeros(m.nrows(), m.ncols());
    let mut off = m.clone();
    for i in 0..m.nrows() {
        diag[(i, i)] = m[(i, i)];
        off[(i, i)] = 0.0;
    }
    Ok((diag, off))
}

/// Per-mode numerical ranks of a tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearRank {
    pub ranks: Vec<usize>,
    pub max: usize,
    /// Set when the tensor is identically zero; all ranks are then 0.
    pub zero: bool,
}

/// Numerical rank of each mode unfolding: the number of singular values
/// above `tol` times the largest one.
pub fn multilinear_rank(t: &Tensor, tol: f64) -> Result<MultilinearRank> {
    if t.is_zero() {
        return Ok(MultilinearRank {
            ranks: vec![0; t.order],
            max: 0,
            zero: true,
        });
    }
    let mut ranks = Vec::with_capacity(t.order);
    for mode in 0..t.order {
        let x = mode_unfolding(t, mode)?;
        ranks.push(numerical_rank(&x, tol));
    }
    let max = ranks.iter().copied().max().unwrap_or(0);
    Ok(MultilinearRank {
        ranks,
        max,
        zero: false,
    })
}

/// Number of singular values strictly above `tol · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = crate::spectral::singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

pub fn frobenius_norm(m: &DMatrix<f64>) -> f64 {
    math::sqrt(m.iter().map(|v| v * v).sum())
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    crate::spectral::singular_values(m)
        .first()
        .copied()
        .unwrap_or(0.0)
}

/// Largest entry magnitude `‖M‖_∞`.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
