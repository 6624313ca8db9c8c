//! Minibatch SGD training and per-epoch evaluation.
//!
//! A training run is a pure function of the model's initial parameters, the
//! datasets, and [`TrainConfig`]: epoch shuffles and dropout masks come from
//! counter-based streams keyed on the config seed, so repeating a run
//! reproduces every metric bit for bit.

use crate::data::{self, Dataset};
use crate::error::{Error, Result};
use crate::loss::{self, LossKind, ProbClampPolicy};
use crate::network::{self, Model, Phase};
use crate::rng;

const STREAM_SHUFFLE: u64 = 5;
const STREAM_STEP_DROPOUT: u64 = 6;

/// Samples per forward pass during evaluation; bounds peak memory without
/// affecting results beyond the usual few-ulp mean-of-chunks rounding.
const EVAL_CHUNK: usize = 256;

/// Hyperparameters for one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub loss: LossKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub clamp_epsilon: f64,
}

impl TrainConfig {
    /// Config with the default hyperparameters: 10 epochs of plain SGD at
    /// learning rate 0.01 with batches of 32, seed 0, and the default
    /// probability clamp.
    pub fn new(loss: LossKind) -> TrainConfig {
        TrainConfig {
            loss,
            epochs: 10,
            batch_size: 32,
            learning_rate: 0.01,
            seed: 0,
            clamp_epsilon: ProbClampPolicy::default().epsilon(),
        }
    }

    /// Check every invariant and build the probability clamp policy.
    pub fn validate(&self) -> Result<ProbClampPolicy> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        ProbClampPolicy::new(self.clamp_epsilon)
    }
}

/// Metrics recorded after one epoch: the model evaluated on the training and
/// test sets under the active loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_loss: f64,
    pub test_acc: f64,
}

/// Apply one gradient step, `w <- w - lr * g` for every parameter, then zero
/// the gradient buffers so the next backward pass starts clean.
pub fn sgd_step(model: &mut Model, learning_rate: f64) {
    model.for_each_param(|param, grad| {
        param
            .axpy(-learning_rate, grad)
            .expect("parameter and gradient buffers share a shape");
    });
    model.zero_grads();
}

/// Shuffle order for one epoch, a pure function of `(seed, epoch)`.
pub fn epoch_permutation(n: usize, seed: u64, epoch: usize) -> Vec<usize> {
    rng::seeded_permutation(n, rng::derive2(seed, STREAM_SHUFFLE, epoch as u64))
}

fn step_dropout_seed(seed: u64, epoch: usize, step: usize) -> u64 {
    rng::derive2(
        rng::derive(seed, STREAM_STEP_DROPOUT),
        epoch as u64,
        step as u64,
    )
}

/// Mean per-sample loss and classification accuracy of `model` on `ds`,
/// with dropout disabled. Predictions take the argmax of each softmax row,
/// ties broken toward the lowest index.
pub fn evaluate(
    model: &Model,
    ds: &Dataset,
    kind: LossKind,
    policy: ProbClampPolicy,
) -> Result<(f64, f64)> {
    let n = ds.len();
    let identity: Vec<usize> = (0..n).collect();
    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    for (features, labels) in data::batches(ds, EVAL_CHUNK, &identity)? {
        let (logits, _) = model.forward(&features, Phase::Eval)?;
        let probs = network::softmax(&logits)?;
        for (i, &label) in labels.iter().enumerate() {
            if network::argmax_row(probs.row(i)) == label {
                correct += 1;
            }
        }
        let clamped = loss::clamp_probs(&probs, policy);
        loss_sum += loss::batch_loss(kind, &clamped, &labels)? * labels.len() as f64;
    }
    Ok((loss_sum / n as f64, correct as f64 / n as f64))
}

fn train_epoch(
    model: &mut Model,
    ds: &Dataset,
    cfg: &TrainConfig,
    policy: ProbClampPolicy,
    epoch: usize,
) -> Result<()> {
    let perm = epoch_permutation(ds.len(), cfg.seed, epoch);
    for (step, (features, labels)) in data::batches(ds, cfg.batch_size, &perm)?.enumerate() {
        let phase = Phase::Train {
            dropout_seed: step_dropout_seed(cfg.seed, epoch, step),
        };
        let (logits, cache) = model.forward(&features, phase)?;
        let dlogits = loss::batch_grad_logits(cfg.loss, &logits, &labels, policy)?;
        model.backward(cache, &dlogits)?;
        sgd_step(model, cfg.learning_rate);
    }
    Ok(())
}

/// Train for `cfg.epochs` epochs, calling `on_epoch` with each completed
/// epoch's [`MetricsRow`] before moving on, so callers can stream metrics
/// out incrementally. Returns all rows.
///
/// Each epoch shuffles the training set with [`epoch_permutation`], walks
/// every minibatch (the final short batch included) through forward, loss
/// gradient, backward, and [`sgd_step`], then evaluates on both datasets.
pub fn train_with(
    model: &mut Model,
    train_set: &Dataset,
    test_set: &Dataset,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&MetricsRow) -> Result<()>,
) -> Result<Vec<MetricsRow>> {
    let policy = cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        train_epoch(model, train_set, cfg, policy, epoch)?;
        let (train_loss, train_acc) = evaluate(model, train_set, cfg.loss, policy)?;
        let (test_loss, test_acc) = evaluate(model, test_set, cfg.loss, policy)?;
        let row = MetricsRow {
            epoch,
            train_loss,
            train_acc,
            test_loss,
            test_acc,
        };
        on_epoch(&row)?;
        rows.push(row);
    }
    Ok(rows)
}

/// [`train_with`] without the per-epoch callback.
pub fn train(
    model: &mut Model,
    train_set: &Dataset,
    test_set: &Dataset,
    cfg: &TrainConfig,
) -> Result<Vec<MetricsRow>> {
    train_with(model, train_set, test_set, cfg, |_| Ok(()))
}
