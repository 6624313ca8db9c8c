//! The three classification losses and their gradients with respect to
//! logits.
//!
//! All three losses score a clamped softmax probability row `p` against a
//! correct class `c`:
//!
//! * cross-entropy: `-ln p_c`
//! * extended binary cross-entropy: `-ln p_c - Σ_{k≠c} ln(1 - p_k)`
//! * negative log likelihood ratio: `-ln(p_c / Σ_{k≠c} p_k)`, with the
//!   denominator computed as the literal sum over competing classes
//!
//! Cross-entropy rewards only the correct class's probability; the other two
//! additionally penalize the competing classes, and the likelihood ratio is
//! unbounded below as `p_c` approaches 1, which is why probabilities are
//! clamped to `[ε, 1-ε]` first ([`ProbClampPolicy`]).
//!
//! [`loss_grad_logits`] differentiates the exact composition
//! `loss(clamp(softmax(z)))`: saturated probabilities have zero local slope,
//! so their direct contributions are masked out before applying the softmax
//! Jacobian. In the interior the results reduce to closed forms
//! (`p - onehot(c)` for cross-entropy, `(p - onehot(c)) / (1 - p_c)` for the
//! likelihood ratio), which the unit tests pin down alongside
//! finite-difference checks.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::softmax_row_in_place;
use crate::tensor::Tensor;

/// Which classification loss to optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    Ce,
    Bce,
    Nllr,
}

impl LossKind {
    pub const ALL: [LossKind; 3] = [LossKind::Ce, LossKind::Bce, LossKind::Nllr];

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Ce => "ce",
            LossKind::Bce => "bce",
            LossKind::Nllr => "nllr",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ce" => Ok(LossKind::Ce),
            "bce" => Ok(LossKind::Bce),
            "nllr" => Ok(LossKind::Nllr),
            other => Err(Error::InvalidConfig(format!(
                "unknown loss {other:?}, expected one of ce, bce, nllr"
            ))),
        }
    }
}

/// How far probabilities are kept away from 0 and 1 before taking logs.
///
/// With the default `ε = 1e-7` the likelihood-ratio loss is bounded to
/// roughly ±16.1 instead of diverging as `p_c → 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbClampPolicy {
    epsilon: f64,
}

impl ProbClampPolicy {
    /// Requires `0 < epsilon < 1e-2`.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1e-2) {
            return Err(Error::InvalidConfig(format!(
                "clamp epsilon must satisfy 0 < epsilon < 1e-2, got {epsilon}"
            )));
        }
        Ok(ProbClampPolicy { epsilon })
    }

    pub fn epsilon(self) -> f64 {
        self.epsilon
    }

    fn clamp(self, p: f64) -> f64 {
        p.clamp(self.epsilon, 1.0 - self.epsilon)
    }
}

impl Default for ProbClampPolicy {
    fn default() -> Self {
        ProbClampPolicy { epsilon: 1e-7 }
    }
}

/// Clamp every probability into `[ε, 1-ε]`, elementwise. Rows are not
/// renormalized afterward, so clamping stays a local monotone map.
pub fn clamp_probs(probs: &Tensor, policy: ProbClampPolicy) -> Tensor {
    probs.ew_map(|p| policy.clamp(p))
}

fn check_row(probs: &[f64], correct: usize) -> Result<()> {
    if probs.len() < 2 {
        return Err(Error::InvalidShape {
            op: "row loss",
            shape: vec![probs.len()],
            detail: "a probability row needs at least 2 classes".into(),
        });
    }
    if correct >= probs.len() {
        return Err(Error::ClassOutOfRange {
            index: correct,
            classes: probs.len(),
        });
    }
    Ok(())
}

/// Cross-entropy of one clamped probability row: `-ln p_c`.
pub fn ce_loss(probs: &[f64], correct: usize) -> Result<f64> {
    check_row(probs, correct)?;
    Ok(-probs[correct].ln())
}

/// Extended binary cross-entropy of one clamped probability row:
/// `-ln p_c - Σ_{k≠c} ln(1 - p_k)`. Always at least [`ce_loss`] on the same
/// row, since every competing term is non-negative.
pub fn bce_loss(probs: &[f64], correct: usize) -> Result<f64> {
    check_row(probs, correct)?;
    let mut total = -probs[correct].ln();
    for (k, &p) in probs.iter().enumerate() {
        if k != correct {
            total -= (1.0 - p).ln();
        }
    }
    Ok(total)
}

/// Negative log likelihood ratio of one clamped probability row:
/// `-ln(p_c / Σ_{k≠c} p_k)`, the denominator being the literal sum over
/// competing classes. Negative whenever `p_c` holds the majority of the mass.
pub fn nllr_loss(probs: &[f64], correct: usize) -> Result<f64> {
    check_row(probs, correct)?;
    let competing: f64 = probs
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != correct)
        .map(|(_, &p)| p)
        .sum();
    Ok(-(probs[correct] / competing).ln())
}

/// One row of the selected loss.
pub fn row_loss(kind: LossKind, probs: &[f64], correct: usize) -> Result<f64> {
    match kind {
        LossKind::Ce => ce_loss(probs, correct),
        LossKind::Bce => bce_loss(probs, correct),
        LossKind::Nllr => nllr_loss(probs, correct),
    }
}

/// Mean of the per-row losses over a `[batch, C]` probability tensor.
pub fn batch_loss(kind: LossKind, probs: &Tensor, labels: &[usize]) -> Result<f64> {
    if probs.rank() != 2 {
        return Err(Error::InvalidShape {
            op: "batch_loss",
            shape: probs.shape().to_vec(),
            detail: "expected a [batch, C] probability tensor".into(),
        });
    }
    let batch = probs.shape()[0];
    if batch == 0 || labels.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if labels.len() != batch {
        return Err(Error::InvalidShape {
            op: "batch_loss",
            shape: vec![labels.len()],
            detail: format!("label count does not match batch size {batch}"),
        });
    }
    let mut total = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        total += row_loss(kind, probs.row(i), label)?;
    }
    Ok(total / batch as f64)
}

/// Gradient of `loss(clamp(softmax(z)))` with respect to one logit row `z`.
///
/// Works in three stages: the loss's derivative with respect to each clamped
/// probability, a mask zeroing coordinates where the clamp saturates (the
/// composition is locally flat there), and the softmax Jacobian
/// `∂p_i/∂z_k = p_i (δ_ik - p_k)`.
pub fn loss_grad_logits(
    kind: LossKind,
    logits: &[f64],
    correct: usize,
    policy: ProbClampPolicy,
) -> Result<Vec<f64>> {
    check_row(logits, correct)?;
    if !logits.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite {
            context: "loss gradient input logits".into(),
        });
    }
    let mut p = logits.to_vec();
    softmax_row_in_place(&mut p);
    let q: Vec<f64> = p.iter().map(|&x| policy.clamp(x)).collect();

    let mut dldp = vec![0.0; p.len()];
    match kind {
        LossKind::Ce => {
            dldp[correct] = -1.0 / q[correct];
        }
        LossKind::Bce => {
            for (k, d) in dldp.iter_mut().enumerate() {
                *d = if k == correct {
                    -1.0 / q[k]
                } else {
                    1.0 / (1.0 - q[k])
                };
            }
        }
        LossKind::Nllr => {
            let competing: f64 = q
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != correct)
                .map(|(_, &x)| x)
                .sum();
            for (k, d) in dldp.iter_mut().enumerate() {
                *d = if k == correct {
                    -1.0 / q[k]
                } else {
                    1.0 / competing
                };
            }
        }
    }
    let eps = policy.epsilon();
    for (d, &prob) in dldp.iter_mut().zip(&p) {
        if prob < eps || prob > 1.0 - eps {
            *d = 0.0;
        }
    }

    let weighted: f64 = dldp.iter().zip(&p).map(|(&d, &prob)| d * prob).sum();
    Ok(p.iter()
        .zip(&dldp)
        .map(|(&prob, &d)| prob * (d - weighted))
        .collect())
}

/// Gradient of the mean batch loss with respect to every logit: row `i` is
/// [`loss_grad_logits`] of that sample divided by the batch size, matching
/// the mean reduction of [`batch_loss`].
pub fn batch_grad_logits(
    kind: LossKind,
    logits: &Tensor,
    labels: &[usize],
    policy: ProbClampPolicy,
) -> Result<Tensor> {
    if logits.rank() != 2 {
        return Err(Error::InvalidShape {
            op: "batch_grad_logits",
            shape: logits.shape().to_vec(),
            detail: "expected a [batch, C] logit tensor".into(),
        });
    }
    let batch = logits.shape()[0];
    if batch == 0 || labels.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if labels.len() != batch {
        return Err(Error::InvalidShape {
            op: "batch_grad_logits",
            shape: vec![labels.len()],
            detail: format!("label count does not match batch size {batch}"),
        });
    }
    let scale = 1.0 / batch as f64;
    let mut out = Vec::with_capacity(logits.len());
    for (i, &label) in labels.iter().enumerate() {
        let row = loss_grad_logits(kind, logits.row(i), label, policy)?;
        out.extend(row.into_iter().map(|g| g * scale));
    }
    Tensor::new(logits.shape().to_vec(), out)
}
