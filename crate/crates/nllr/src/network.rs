//! Sequential models: layer definitions, the forward pass, and
//! backpropagation.
//!
//! A [`Model`] is an ordered list of layers that maps a batch of samples to a
//! batch of logits, one row of class scores per sample. Softmax is applied at
//! the loss boundary rather than stored as a layer, so the loss functions can
//! produce gradients directly in logit space.
//!
//! The forward pass returns a [`ForwardCache`] holding the activations that
//! backpropagation needs. [`Model::backward`] takes the cache by value, so a
//! cache can never be replayed against updated parameters, and it additionally
//! checks that the cache structurally matches the model it came from.

use crate::error::{Error, Result};
use crate::rng::{self, SplitMix64};
use crate::tensor::Tensor;

/// Stream tags for deriving per-layer random streams from one master seed.
const STREAM_INIT: u64 = 1;
const STREAM_DROPOUT: u64 = 2;

/// One transformation in a sequential model.
///
/// Parameterized variants carry their parameters and a gradient buffer of
/// identical shape; [`Model::backward`] fills the buffers with the gradient of
/// the batch loss.
#[derive(Debug, Clone)]
pub enum Layer {
    /// Fully connected: `y = x W + b` with `W: [in, out]`, `b: [out]`.
    Dense {
        w: Tensor,
        b: Tensor,
        dw: Tensor,
        db: Tensor,
    },
    /// Elementwise `max(x, 0)`; the derivative at exactly 0 is taken as 0.
    Relu,
    /// Valid-padding, stride-1 convolution over `[channels, height, width]`
    /// inputs with kernel `[out_ch, in_ch, kh, kw]` and one bias per output
    /// channel.
    Conv2d {
        kernel: Tensor,
        b: Tensor,
        dk: Tensor,
        db: Tensor,
    },
    /// Non-overlapping max pooling with window `[ph, pw]`; output dims are
    /// floor-divided and trailing rows/columns that do not fill a window are
    /// dropped. Ties go to the first maximal element in row-major order.
    MaxPool2d { ph: usize, pw: usize },
    /// Inverted dropout: at train time each element is zeroed with
    /// probability `rate` and survivors are scaled by `1/(1-rate)`, so the
    /// eval path needs no correction.
    Dropout { rate: f64 },
    /// Collapse each sample to rank 1, preserving row-major order.
    Flatten,
}

impl Layer {
    /// Dense layer with zeroed parameters; call [`Model::init_params`] before
    /// training.
    pub fn dense(input: usize, output: usize) -> Result<Layer> {
        if input == 0 || output == 0 {
            return Err(Error::InvalidConfig(format!(
                "dense layer dimensions must be >= 1, got {input}x{output}"
            )));
        }
        Ok(Layer::Dense {
            w: Tensor::zeros(&[input, output]),
            b: Tensor::zeros(&[output]),
            dw: Tensor::zeros(&[input, output]),
            db: Tensor::zeros(&[output]),
        })
    }

    pub fn relu() -> Layer {
        Layer::Relu
    }

    /// Convolution layer with zeroed parameters.
    pub fn conv2d(in_ch: usize, out_ch: usize, kh: usize, kw: usize) -> Result<Layer> {
        if in_ch == 0 || out_ch == 0 || kh == 0 || kw == 0 {
            return Err(Error::InvalidConfig(format!(
                "conv2d dimensions must be >= 1, got in_ch={in_ch} out_ch={out_ch} kernel={kh}x{kw}"
            )));
        }
        Ok(Layer::Conv2d {
            kernel: Tensor::zeros(&[out_ch, in_ch, kh, kw]),
            b: Tensor::zeros(&[out_ch]),
            dk: Tensor::zeros(&[out_ch, in_ch, kh, kw]),
            db: Tensor::zeros(&[out_ch]),
        })
    }

    pub fn max_pool2d(ph: usize, pw: usize) -> Result<Layer> {
        if ph == 0 || pw == 0 {
            return Err(Error::InvalidConfig(format!(
                "max pool window must be >= 1, got {ph}x{pw}"
            )));
        }
        Ok(Layer::MaxPool2d { ph, pw })
    }

    pub fn dropout(rate: f64) -> Result<Layer> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidConfig(format!(
                "dropout rate must be in [0, 1), got {rate}"
            )));
        }
        Ok(Layer::Dropout { rate })
    }

    pub fn flatten() -> Layer {
        Layer::Flatten
    }

    /// Short name used in shape-error messages.
    pub fn name(&self) -> &'static str {
        match self {
            Layer::Dense { .. } => "dense",
            Layer::Relu => "relu",
            Layer::Conv2d { .. } => "conv2d",
            Layer::MaxPool2d { .. } => "max_pool2d",
            Layer::Dropout { .. } => "dropout",
            Layer::Flatten => "flatten",
        }
    }

    /// Per-sample output shape given a per-sample input shape, or an error if
    /// the layer cannot accept it.
    fn output_shape(&self, input: &[usize]) -> std::result::Result<Vec<usize>, String> {
        match self {
            Layer::Dense { w, .. } => {
                let (rows, cols) = (w.shape()[0], w.shape()[1]);
                if input != [rows] {
                    return Err(format!("expects [{rows}] input, found {input:?}"));
                }
                Ok(vec![cols])
            }
            Layer::Relu | Layer::Dropout { .. } => Ok(input.to_vec()),
            Layer::Conv2d { kernel, .. } => {
                let ks = kernel.shape();
                let (out_ch, in_ch, kh, kw) = (ks[0], ks[1], ks[2], ks[3]);
                match input {
                    [c, h, w] if *c == in_ch && *h >= kh && *w >= kw => {
                        Ok(vec![out_ch, h - kh + 1, w - kw + 1])
                    }
                    _ => Err(format!(
                        "expects [{in_ch}, h>={kh}, w>={kw}] input, found {input:?}"
                    )),
                }
            }
            Layer::MaxPool2d { ph, pw } => match input {
                [c, h, w] if *h >= *ph && *w >= *pw => Ok(vec![*c, h / ph, w / pw]),
                _ => Err(format!(
                    "expects [c, h>={ph}, w>={pw}] input, found {input:?}"
                )),
            },
            Layer::Flatten => Ok(vec![input.iter().product()]),
        }
    }
}

/// Whether a forward pass is for training or evaluation.
///
/// Dropout is active only in [`Phase::Train`], and its masks are a pure
/// function of the carried seed, so a training step can be replayed exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Eval,
    Train { dropout_seed: u64 },
}

/// Per-layer activation record from a forward pass, consumed by backward.
#[derive(Debug)]
enum CacheEntry {
    Dense { input: Tensor },
    Relu { input: Tensor },
    Conv2d { input: Tensor },
    MaxPool2d { input_shape: Vec<usize>, source: Vec<usize> },
    DropoutTrain { mask: Tensor },
    DropoutEval,
    Flatten { input_shape: Vec<usize> },
}

impl CacheEntry {
    fn matches(&self, layer: &Layer) -> bool {
        matches!(
            (self, layer),
            (CacheEntry::Dense { .. }, Layer::Dense { .. })
                | (CacheEntry::Relu { .. }, Layer::Relu)
                | (CacheEntry::Conv2d { .. }, Layer::Conv2d { .. })
                | (CacheEntry::MaxPool2d { .. }, Layer::MaxPool2d { .. })
                | (CacheEntry::DropoutTrain { .. }, Layer::Dropout { .. })
                | (CacheEntry::DropoutEval, Layer::Dropout { .. })
                | (CacheEntry::Flatten { .. }, Layer::Flatten)
        )
    }
}

/// Activations recorded by [`Model::forward`], needed by [`Model::backward`].
///
/// Owns its data and is consumed by the backward pass.
#[derive(Debug)]
pub struct ForwardCache {
    entries: Vec<CacheEntry>,
}

/// A sequential model plus the per-sample input shape it was validated
/// against.
///
/// Construction walks the layer list symbolically and rejects incompatible
/// consecutive shapes, so forward passes can only fail on batches whose
/// sample shape differs from the declared one.
#[derive(Debug, Clone)]
pub struct Model {
    input_shape: Vec<usize>,
    layers: Vec<Layer>,
    classes: usize,
}

impl Model {
    /// Validate the layer chain against `input_shape` (per sample, without
    /// the batch dimension). The final layer must produce `[C]` with `C >= 2`.
    pub fn new(input_shape: Vec<usize>, layers: Vec<Layer>) -> Result<Model> {
        if input_shape.is_empty() || input_shape.contains(&0) {
            return Err(Error::InvalidShape {
                op: "Model::new",
                shape: input_shape,
                detail: "input shape must be non-empty with every dimension >= 1".into(),
            });
        }
        let mut shape = input_shape.clone();
        for (index, layer) in layers.iter().enumerate() {
            shape = layer.output_shape(&shape).map_err(|detail| Error::ModelBuild {
                index,
                layer: layer.name(),
                detail,
            })?;
            if shape.contains(&0) {
                return Err(Error::ModelBuild {
                    index,
                    layer: layer.name(),
                    detail: format!("produces an empty shape {shape:?}"),
                });
            }
        }
        if shape.len() != 1 || shape[0] < 2 {
            return Err(Error::InvalidShape {
                op: "Model::new",
                shape,
                detail: "final layer must output [C] per sample with C >= 2".into(),
            });
        }
        Ok(Model {
            input_shape,
            classes: shape[0],
            layers,
        })
    }

    /// Per-sample input shape the model accepts.
    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    /// Number of output classes C.
    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Draw every weight from a seeded uniform distribution with bound
    /// `sqrt(2 / fan_in)` and zero every bias. Each layer gets its own
    /// derived stream, so inserting a layer does not shift the others.
    pub fn init_params(&mut self, seed: u64) {
        for (index, layer) in self.layers.iter_mut().enumerate() {
            let mut stream = SplitMix64::new(rng::derive2(seed, STREAM_INIT, index as u64));
            match layer {
                Layer::Dense { w, b, .. } => {
                    let fan_in = w.shape()[0] as f64;
                    let bound = (2.0 / fan_in).sqrt();
                    for x in w.data_mut() {
                        *x = stream.next_symmetric(bound);
                    }
                    b.fill(0.0);
                }
                Layer::Conv2d { kernel, b, .. } => {
                    let ks = kernel.shape();
                    let fan_in = (ks[1] * ks[2] * ks[3]) as f64;
                    let bound = (2.0 / fan_in).sqrt();
                    for x in kernel.data_mut() {
                        *x = stream.next_symmetric(bound);
                    }
                    b.fill(0.0);
                }
                _ => {}
            }
        }
    }

    /// Zero every gradient buffer.
    pub fn zero_grads(&mut self) {
        for layer in &mut self.layers {
            match layer {
                Layer::Dense { dw, db, .. } => {
                    dw.fill(0.0);
                    db.fill(0.0);
                }
                Layer::Conv2d { dk, db, .. } => {
                    dk.fill(0.0);
                    db.fill(0.0);
                }
                _ => {}
            }
        }
    }

    /// Total number of trainable scalars.
    pub fn param_count(&self) -> usize {
        let mut count = 0;
        for layer in &self.layers {
            match layer {
                Layer::Dense { w, b, .. } => count += w.len() + b.len(),
                Layer::Conv2d { kernel, b, .. } => count += kernel.len() + b.len(),
                _ => {}
            }
        }
        count
    }

    /// Visit every (parameter, gradient) tensor pair in declaration order.
    pub fn for_each_param(&mut self, mut f: impl FnMut(&mut Tensor, &Tensor)) {
        for layer in &mut self.layers {
            match layer {
                Layer::Dense { w, b, dw, db } => {
                    f(w, dw);
                    f(b, db);
                }
                Layer::Conv2d { kernel, b, dk, db } => {
                    f(kernel, dk);
                    f(b, db);
                }
                _ => {}
            }
        }
    }

    /// Read the `i`-th trainable scalar, indexing the concatenation of all
    /// parameter tensors in declaration order.
    pub fn get_param(&self, mut i: usize) -> f64 {
        for layer in &self.layers {
            let tensors: [&Tensor; 2] = match layer {
                Layer::Dense { w, b, .. } => [w, b],
                Layer::Conv2d { kernel, b, .. } => [kernel, b],
                _ => continue,
            };
            for t in tensors {
                if i < t.len() {
                    return t.data()[i];
                }
                i -= t.len();
            }
        }
        panic!("parameter index out of range");
    }

    /// Overwrite the `i`-th trainable scalar; same indexing as `get_param`.
    pub fn set_param(&mut self, mut i: usize, value: f64) {
        for layer in &mut self.layers {
            let tensors: [&mut Tensor; 2] = match layer {
                Layer::Dense { w, b, .. } => [w, b],
                Layer::Conv2d { kernel, b, .. } => [kernel, b],
                _ => continue,
            };
            for t in tensors {
                if i < t.len() {
                    t.data_mut()[i] = value;
                    return;
                }
                i -= t.len();
            }
        }
        panic!("parameter index out of range");
    }

    /// Read the gradient of the `i`-th trainable scalar.
    pub fn get_grad(&self, mut i: usize) -> f64 {
        for layer in &self.layers {
            let tensors: [&Tensor; 2] = match layer {
                Layer::Dense { dw, db, .. } => [dw, db],
                Layer::Conv2d { dk, db, .. } => [dk, db],
                _ => continue,
            };
            for t in tensors {
                if i < t.len() {
                    return t.data()[i];
                }
                i -= t.len();
            }
        }
        panic!("parameter index out of range");
    }

    /// Run the model on a batch whose first dimension indexes samples.
    /// Returns pre-softmax logits `[batch, C]` and the activation cache.
    pub fn forward(&self, batch: &Tensor, phase: Phase) -> Result<(Tensor, ForwardCache)> {
        if batch.shape().is_empty() || batch.shape()[1..] != *self.input_shape {
            return Err(Error::LayerInput {
                index: 0,
                layer: "input",
                expected: format!("[batch, {:?}]", self.input_shape),
                found: format!("{:?}", batch.shape()),
            });
        }
        if batch.shape()[0] == 0 {
            return Err(Error::EmptyBatch);
        }
        let mut current = batch.clone();
        let mut entries = Vec::with_capacity(self.layers.len());
        for (index, layer) in self.layers.iter().enumerate() {
            let (next, entry) = self.forward_layer(index, layer, current, phase)?;
            entries.push(entry);
            current = next;
        }
        Ok((current, ForwardCache { entries }))
    }

    fn forward_layer(
        &self,
        index: usize,
        layer: &Layer,
        input: Tensor,
        phase: Phase,
    ) -> Result<(Tensor, CacheEntry)> {
        let mismatch = |expected: String| Error::LayerInput {
            index,
            layer: layer.name(),
            expected,
            found: format!("{:?}", input.shape()),
        };
        match layer {
            Layer::Dense { w, b, .. } => {
                if input.rank() != 2 || input.shape()[1] != w.shape()[0] {
                    return Err(mismatch(format!("[batch, {}]", w.shape()[0])));
                }
                let mut out = input.matmul(w)?;
                let cols = out.shape()[1];
                for row in out.data_mut().chunks_mut(cols) {
                    for (y, &bias) in row.iter_mut().zip(b.data()) {
                        *y += bias;
                    }
                }
                Ok((out, CacheEntry::Dense { input }))
            }
            Layer::Relu => {
                let out = input.ew_map(|x| if x > 0.0 { x } else { 0.0 });
                Ok((out, CacheEntry::Relu { input }))
            }
            Layer::Conv2d { kernel, b, .. } => {
                let ks = kernel.shape();
                let (out_ch, in_ch, kh, kw) = (ks[0], ks[1], ks[2], ks[3]);
                let s = input.shape();
                if s.len() != 4 || s[1] != in_ch || s[2] < kh || s[3] < kw {
                    return Err(mismatch(format!("[batch, {in_ch}, h>={kh}, w>={kw}]")));
                }
                let (batch, h, w) = (s[0], s[2], s[3]);
                let (oh, ow) = (h - kh + 1, w - kw + 1);
                let mut out = Tensor::zeros(&[batch, out_ch, oh, ow]);
                let x = input.data();
                let k = kernel.data();
                let y = out.data_mut();
                for bi in 0..batch {
                    for oc in 0..out_ch {
                        let bias = b.data()[oc];
                        for r in 0..oh {
                            for c in 0..ow {
                                let mut acc = bias;
                                for ic in 0..in_ch {
                                    for dr in 0..kh {
                                        let xoff = ((bi * in_ch + ic) * h + r + dr) * w + c;
                                        let koff = ((oc * in_ch + ic) * kh + dr) * kw;
                                        for dc in 0..kw {
                                            acc += x[xoff + dc] * k[koff + dc];
                                        }
                                    }
                                }
                                y[((bi * out_ch + oc) * oh + r) * ow + c] = acc;
                            }
                        }
                    }
                }
                Ok((out, CacheEntry::Conv2d { input }))
            }
            Layer::MaxPool2d { ph, pw } => {
                let s = input.shape();
                if s.len() != 4 || s[2] < *ph || s[3] < *pw {
                    return Err(mismatch(format!("[batch, c, h>={ph}, w>={pw}]")));
                }
                let (batch, ch, h, w) = (s[0], s[1], s[2], s[3]);
                let (oh, ow) = (h / ph, w / pw);
                let mut out = Tensor::zeros(&[batch, ch, oh, ow]);
                let mut source = vec![0usize; batch * ch * oh * ow];
                let x = input.data();
                let y = out.data_mut();
                for bi in 0..batch {
                    for c in 0..ch {
                        let plane = (bi * ch + c) * h * w;
                        for r in 0..oh {
                            for q in 0..ow {
                                let mut best_idx = plane + (r * ph) * w + q * pw;
                                let mut best = x[best_idx];
                                for dr in 0..*ph {
                                    for dc in 0..*pw {
                                        let idx = plane + (r * ph + dr) * w + q * pw + dc;
                                        if x[idx] > best {
                                            best = x[idx];
                                            best_idx = idx;
                                        }
                                    }
                                }
                                let o = ((bi * ch + c) * oh + r) * ow + q;
                                y[o] = best;
                                source[o] = best_idx;
                            }
                        }
                    }
                }
                let input_shape = s.to_vec();
                Ok((out, CacheEntry::MaxPool2d { input_shape, source }))
            }
            Layer::Dropout { rate } => match phase {
                Phase::Eval => Ok((input, CacheEntry::DropoutEval)),
                Phase::Train { dropout_seed } => {
                    let mut stream =
                        SplitMix64::new(rng::derive2(dropout_seed, STREAM_DROPOUT, index as u64));
                    let keep = 1.0 / (1.0 - rate);
                    let mask = Tensor::new(
                        input.shape().to_vec(),
                        (0..input.len())
                            .map(|_| if stream.next_f64() < *rate { 0.0 } else { keep })
                            .collect(),
                    )?;
                    let out = input.ew_zip(&mask, |x, m| x * m)?;
                    Ok((out, CacheEntry::DropoutTrain { mask }))
                }
            },
            Layer::Flatten => {
                let s = input.shape();
                let batch = s[0];
                let features: usize = s[1..].iter().product();
                let input_shape = s.to_vec();
                let out = input.reshape(vec![batch, features])?;
                Ok((out, CacheEntry::Flatten { input_shape }))
            }
        }
    }

    /// Backpropagate `dlogits` (gradient of the batch loss with respect to
    /// the logits) through the model, filling every gradient buffer with
    /// the gradient of the batch loss. Consumes the cache.
    pub fn backward(&mut self, cache: ForwardCache, dlogits: &Tensor) -> Result<()> {
        if cache.entries.len() != self.layers.len() {
            return Err(Error::CacheMismatch {
                detail: format!(
                    "cache has {} entries for a model with {} layers",
                    cache.entries.len(),
                    self.layers.len()
                ),
            });
        }
        let mut grad = dlogits.clone();
        for (index, (layer, entry)) in self
            .layers
            .iter_mut()
            .zip(cache.entries)
            .enumerate()
            .rev()
        {
            if !entry.matches(layer) {
                return Err(Error::CacheMismatch {
                    detail: format!(
                        "cache entry {index} does not match layer {index} ({})",
                        layer.name()
                    ),
                });
            }
            grad = Self::backward_layer(layer, entry, grad)?;
        }
        Ok(())
    }

    fn backward_layer(layer: &mut Layer, entry: CacheEntry, grad: Tensor) -> Result<Tensor> {
        match (layer, entry) {
            (Layer::Dense { w, dw, db, .. }, CacheEntry::Dense { input }) => {
                *dw = input.transpose()?.matmul(&grad)?;
                *db = grad.sum_axis(0)?;
                grad.matmul(&w.transpose()?)
            }
            (Layer::Relu, CacheEntry::Relu { input }) => {
                grad.ew_zip(&input, |g, x| if x > 0.0 { g } else { 0.0 })
            }
            (Layer::Conv2d { kernel, dk, db, .. }, CacheEntry::Conv2d { input }) => {
                let ks = kernel.shape();
                let (out_ch, in_ch, kh, kw) = (ks[0], ks[1], ks[2], ks[3]);
                let s = input.shape();
                let (batch, h, w) = (s[0], s[2], s[3]);
                let gs = grad.shape();
                let (oh, ow) = (gs[2], gs[3]);
                let mut dx = Tensor::zeros(s);
                dk.fill(0.0);
                db.fill(0.0);
                let x = input.data();
                let k = kernel.data();
                let g = grad.data();
                let dxd = dx.data_mut();
                let dkd = dk.data_mut();
                let dbd = db.data_mut();
                for bi in 0..batch {
                    for oc in 0..out_ch {
                        for r in 0..oh {
                            for c in 0..ow {
                                let gv = g[((bi * out_ch + oc) * oh + r) * ow + c];
                                if gv == 0.0 {
                                    continue;
                                }
                                dbd[oc] += gv;
                                for ic in 0..in_ch {
                                    for dr in 0..kh {
                                        let xoff = ((bi * in_ch + ic) * h + r + dr) * w + c;
                                        let koff = ((oc * in_ch + ic) * kh + dr) * kw;
                                        for dc in 0..kw {
                                            dkd[koff + dc] += gv * x[xoff + dc];
                                            dxd[xoff + dc] += gv * k[koff + dc];
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                Ok(dx)
            }
            (Layer::MaxPool2d { .. }, CacheEntry::MaxPool2d { input_shape, source }) => {
                let mut dx = Tensor::zeros(&input_shape);
                let dxd = dx.data_mut();
                for (o, &src) in source.iter().enumerate() {
                    dxd[src] += grad.data()[o];
                }
                Ok(dx)
            }
            (Layer::Dropout { .. }, CacheEntry::DropoutTrain { mask }) => {
                grad.ew_zip(&mask, |g, m| g * m)
            }
            (Layer::Dropout { .. }, CacheEntry::DropoutEval) => Ok(grad),
            (Layer::Flatten, CacheEntry::Flatten { input_shape }) => grad.reshape(input_shape),
            _ => unreachable!("cache structure verified before dispatch"),
        }
    }
}

/// Numerically stable softmax over the rows of a `[batch, C]` logit tensor.
///
/// Each row has its maximum subtracted before exponentiation, so arbitrarily
/// large logits cannot overflow. Rows sum to 1 with entries in `[0, 1]`,
/// strictly inside except where exponent underflow saturates an entry; the
/// loss-side probability clamp guards that case.
pub fn softmax(logits: &Tensor) -> Result<Tensor> {
    if logits.rank() != 2 || logits.shape()[1] < 2 {
        return Err(Error::InvalidShape {
            op: "softmax",
            shape: logits.shape().to_vec(),
            detail: "softmax needs a [batch, C] tensor with C >= 2".into(),
        });
    }
    if !logits.data().iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite {
            context: "softmax input logits".into(),
        });
    }
    let cols = logits.shape()[1];
    let mut out = logits.clone();
    for row in out.data_mut().chunks_mut(cols) {
        softmax_row_in_place(row);
    }
    Ok(out)
}

/// Softmax over a single slice of logits, in place.
pub fn softmax_row_in_place(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for x in row.iter_mut() {
        *x = (*x - max).exp();
        total += *x;
    }
    for x in row.iter_mut() {
        *x /= total;
    }
}

/// Index of the largest value; ties go to the earliest index.
pub fn argmax_row(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = i;
        }
    }
    best
}

/// Predicted class per sample: argmax over each row of the logits.
pub fn predict(model: &Model, batch: &Tensor) -> Result<Vec<usize>> {
    let (logits, _) = model.forward(batch, Phase::Eval)?;
    let cols = logits.shape()[1];
    Ok(logits.data().chunks(cols).map(argmax_row).collect())
}
