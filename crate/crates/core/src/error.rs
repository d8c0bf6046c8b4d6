use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("expected {expected} values for a tensor of order {order} and dimension {dim}, got {got}")]
    ValueCount {
        order: usize,
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid unfolding {rows_modes}x{cols_modes} of an order-{order} tensor")]
    InvalidUnfolding {
        rows_modes: usize,
        cols_modes: usize,
        order: usize,
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("index {index:?} out of range for dimension {dim}")]
    IndexOutOfRange { index: alloc::vec::Vec<usize>, dim: usize },
    #[error("duplicate observation at {0:?}")]
    DuplicateEntry(alloc::vec::Vec<usize>),
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("observation mask is empty")]
    EmptyMask,
    #[error("mask holds {n} entries but the tensor only has {capacity}")]
    OverfullMask { n: usize, capacity: usize },
    #[error("input is identically zero")]
    Zero,
    #[error("basis columns are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("unsupported tensor order {0}")]
    UnsupportedOrder(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}
