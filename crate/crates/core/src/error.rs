use thiserror::Error;

/// Errors raised by tensor construction, algebra and the generalized-inverse constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("extent {extent} at axis {axis} must be at least 1")]
    ZeroExtent { axis: usize, extent: usize },

    #[error("split point {split} exceeds the number of axes {ndim}")]
    InvalidSplit { split: usize, ndim: usize },

    #[error("shape {shape:?} holds {expected} entries, got {actual}")]
    EntryCount {
        shape: Vec<usize>,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite entry at linear index {index}")]
    NonFinite { index: usize },

    #[error("shape mismatch at axis {axis}: left extent {left}, right extent {right}")]
    ShapeMismatch { axis: usize, left: usize, right: usize },

    #[error("cannot contract {requested} axes: operands have {left_ndim} and {right_ndim} axes")]
    ContractionOrder {
        requested: usize,
        left_ndim: usize,
        right_ndim: usize,
    },

    #[error("column block {left:?} does not match row block {right:?}")]
    BlockMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("operand shapes differ: {left:?} vs {right:?}")]
    ShapeDiffers { left: Vec<usize>, right: Vec<usize> },

    #[error("tensor is not square: rows {rows:?}, columns {cols:?}")]
    NotSquare { rows: Vec<usize>, cols: Vec<usize> },

    #[error("matrix is {rows}x{cols} but shape {shape:?} (split {split}) needs {need_rows}x{need_cols}")]
    MatrixSize {
        rows: usize,
        cols: usize,
        shape: Vec<usize>,
        split: usize,
        need_rows: usize,
        need_cols: usize,
    },

    #[error("flattened dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("tensor is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("rank precondition violated: {detail}")]
    RankPrecondition { detail: String },

    #[error("precondition failed: {detail}")]
    Precondition { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
