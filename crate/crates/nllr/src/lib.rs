#![doc = include_str!("../../../README.md")]

pub mod data;
pub mod error;
pub mod gradcheck;
pub mod guide;
pub mod loss;
pub mod metrics;
pub mod network;
pub mod plot;
pub mod rng;
pub mod tensor;
pub mod train;

pub use data::{synth_blobs, Dataset};
pub use error::{Error, Result};
pub use loss::{LossKind, ProbClampPolicy};
pub use network::{softmax, Layer, Model, Phase};
pub use tensor::Tensor;
pub use train::{evaluate, train, MetricsRow, TrainConfig};
