//! Spectral completion of partially observed low-rank tensors.
//!
//! Two one-shot estimators are provided:
//!
//! - [`unfold::complete_unfold`] completes a symmetric order-`k` tensor by
//!   estimating the column space of its balanced unfolding from a rescaled
//!   Gram matrix, then projecting a debiased observation onto the induced
//!   tensor-product subspace.
//! - [`contraction::complete_contraction`] handles overcomplete third-order
//!   tensors (rank above the dimension) by contracting two independently
//!   observed copies along a shared mode and thresholding the singular
//!   vectors of the resulting `d² × d²` matrix.
//!
//! Both rest on the column-space estimator for wide partially revealed
//! matrices in [`matrix`]. The crate is `no_std` (with `alloc`); file formats,
//! the experiment harness and the command-line tool live in the companion
//! `tensorfill` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod completion;
pub mod contraction;
mod error;
mod math;
pub mod matrix;
pub mod random;
pub mod sampling;
pub mod spectral;
pub mod tensor;
pub mod unfold;

pub use completion::{CompletionResult, Diagnostics, RegimeWarning};
pub use error::{Error, Result};
pub use nalgebra::{DMatrix, DVector};
pub use spectral::{ProjectionPattern, SpectralProjector, SpectrumSide};
pub use tensor::{ObservationMask, PartialTensor, Tensor, UnfoldedMatrix};

/// Relative tolerance used for numerical ranks unless the caller overrides it.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
