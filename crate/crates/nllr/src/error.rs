//! Crate-wide error type.
//!
//! Shape and format problems are recoverable errors, not panics: datasets and
//! configurations come from user files and flags, so every boundary check
//! reports what it saw.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two tensors with incompatible shapes were combined.
    #[error("shape mismatch in {op}: left shape {left:?}, right shape {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    /// A tensor had the wrong shape for an operation (wrong rank, bad dims).
    #[error("invalid shape for {op}: got {shape:?} ({detail})")]
    InvalidShape {
        op: &'static str,
        shape: Vec<usize>,
        detail: String,
    },

    #[error("axis {axis} out of range for tensor of rank {rank}")]
    AxisOutOfRange { axis: usize, rank: usize },

    /// Input did not fit the layer at `index` during forward propagation.
    #[error("layer {index} ({layer}): expected input shape {expected}, got {found}")]
    LayerInput {
        index: usize,
        layer: &'static str,
        expected: String,
        found: String,
    },

    /// Model construction found two adjacent layers that cannot be chained.
    #[error("model validation failed at layer {index} ({layer}): {detail}")]
    ModelBuild {
        index: usize,
        layer: &'static str,
        detail: String,
    },

    /// A backward call received a cache that was not produced by a matching
    /// forward call on the same model.
    #[error("forward cache does not match the model: {detail}")]
    CacheMismatch { detail: String },

    #[error("class index {index} out of range for {classes} classes")]
    ClassOutOfRange { index: usize, classes: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("empty batch: at least one sample is required")]
    EmptyBatch,

    #[error("empty dataset: at least one sample is required")]
    EmptyDataset,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// IDX file whose magic word names a different type/rank than expected.
    #[error("bad IDX magic number: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },

    /// A file ended before the byte count promised by its header.
    #[error("truncated file: needed {needed} bytes, found {found}")]
    Truncated { needed: usize, found: usize },

    #[error("image/label count mismatch: {images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    /// A record-structured file whose size is not a whole number of records.
    #[error("file size {size} is not a multiple of the {record}-byte record size")]
    BadRecordSize { size: usize, record: usize },

    #[error("label {label} exceeds the maximum class index {max}")]
    LabelOutOfRange { label: usize, max: usize },

    #[error("invalid permutation: {detail}")]
    InvalidPermutation { detail: String },

    #[error("csv line {line}: {detail}")]
    Csv { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
