//! Finite-difference oracle for validating analytic gradients.
//!
//! Backpropagation is easy to get subtly wrong, so every gradient in this
//! crate is cross-checked against central difference quotients before it is
//! trusted: [`fd_gradient`] differentiates an arbitrary scalar function of a
//! tensor, and [`check_model`] compares a model's backward pass against the
//! oracle parameter by parameter.
//!
//! The oracle runs one forward pass per parameter per side, so it is meant
//! for small models (roughly up to 5k parameters).

use crate::error::{Error, Result};
use crate::loss::{batch_grad_logits, batch_loss, clamp_probs, LossKind, ProbClampPolicy};
use crate::network::{softmax, Model, Phase};
use crate::tensor::Tensor;

/// Step size for the central difference quotient.
pub const FD_STEP: f64 = 1e-5;

/// Dropout masks are part of the differentiated function, so they are pinned
/// to one fixed stream during checking.
const CHECK_DROPOUT_SEED: u64 = 0x5eed;

/// Outcome of one oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub worst_param_index: usize,
    pub passed: bool,
    pub tolerance: f64,
}

/// Central difference gradient of `f` at `x`: component `i` is
/// `(f(x + h·e_i) - f(x - h·e_i)) / 2h`.
pub fn fd_gradient(
    mut f: impl FnMut(&Tensor) -> Result<f64>,
    x: &Tensor,
    h: f64,
) -> Result<Tensor> {
    let mut grad = Tensor::zeros(x.shape());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let original = probe.data()[i];
        probe.data_mut()[i] = original + h;
        let plus = f(&probe)?;
        probe.data_mut()[i] = original - h;
        let minus = f(&probe)?;
        probe.data_mut()[i] = original;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite {
                context: format!("finite-difference evaluation at component {i}"),
            });
        }
        grad.data_mut()[i] = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}

/// The scalar under test: mean batch loss of the model's clamped softmax
/// output, with dropout masks pinned so repeated evaluations differentiate
/// one fixed function.
fn model_batch_loss(
    model: &Model,
    features: &Tensor,
    labels: &[usize],
    kind: LossKind,
    policy: ProbClampPolicy,
) -> Result<f64> {
    let phase = Phase::Train {
        dropout_seed: CHECK_DROPOUT_SEED,
    };
    let (logits, _) = model.forward(features, phase)?;
    let probs = clamp_probs(&softmax(&logits)?, policy);
    batch_loss(kind, &probs, labels)
}

/// Run forward and backward once and return every parameter's analytic
/// gradient of the mean batch loss, in parameter-index order.
pub fn backward_param_gradients(
    model: &mut Model,
    features: &Tensor,
    labels: &[usize],
    kind: LossKind,
    policy: ProbClampPolicy,
) -> Result<Vec<f64>> {
    let phase = Phase::Train {
        dropout_seed: CHECK_DROPOUT_SEED,
    };
    let (logits, cache) = model.forward(features, phase)?;
    let dlogits = batch_grad_logits(kind, &logits, labels, policy)?;
    model.backward(cache, &dlogits)?;
    Ok((0..model.param_count()).map(|i| model.get_grad(i)).collect())
}

/// Compare a candidate gradient vector against the finite-difference oracle
/// of the model's batch loss. Relative error per parameter is
/// `|a - b| / max(|a|, |b|, 1e-8)`; the report carries the worst one.
pub fn check_gradients(
    model: &mut Model,
    features: &Tensor,
    labels: &[usize],
    kind: LossKind,
    policy: ProbClampPolicy,
    candidate: &[f64],
    tolerance: f64,
) -> Result<GradCheckReport> {
    if candidate.len() != model.param_count() {
        return Err(Error::InvalidConfig(format!(
            "candidate gradient has {} entries for a model with {} parameters",
            candidate.len(),
            model.param_count()
        )));
    }
    let mut max_rel_error: f64 = 0.0;
    let mut worst_param_index = 0;
    for (i, &analytic) in candidate.iter().enumerate() {
        let original = model.get_param(i);
        model.set_param(i, original + FD_STEP);
        let plus = model_batch_loss(model, features, labels, kind, policy)?;
        model.set_param(i, original - FD_STEP);
        let minus = model_batch_loss(model, features, labels, kind, policy)?;
        model.set_param(i, original);
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite {
                context: format!("finite-difference evaluation at parameter {i}"),
            });
        }
        let numeric = (plus - minus) / (2.0 * FD_STEP);
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
        if rel > max_rel_error {
            max_rel_error = rel;
            worst_param_index = i;
        }
    }
    Ok(GradCheckReport {
        max_rel_error,
        worst_param_index,
        passed: max_rel_error < tolerance,
        tolerance,
    })
}

/// Validate the model's own backward pass against the oracle.
pub fn check_model(
    model: &mut Model,
    features: &Tensor,
    labels: &[usize],
    kind: LossKind,
    policy: ProbClampPolicy,
    tolerance: f64,
) -> Result<GradCheckReport> {
    let analytic = backward_param_gradients(model, features, labels, kind, policy)?;
    check_gradients(model, features, labels, kind, policy, &analytic, tolerance)
}
