//! Dense feed-forward engine with manual backpropagation, L1-regularized
//! training, masked (prunable) weights, and the per-sample affine collapse
//! of ReLU networks.
//!
//! Training is single-threaded and deterministic given the seed. Masked
//! weights are exactly zero and stay zero: their gradients are zeroed and
//! the mask is re-applied after every optimizer step.

use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::Criterion;
use crate::error::{Error, Result};

/// Serialization format version for network files.
pub const NETWORK_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Sigmoid,
    Relu,
    Identity,
}

impl Activation {
    pub fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    /// Derivative as a function of pre-activation. A ReLU sitting exactly
    /// on zero counts as inactive (subgradient 0).
    pub fn derivative(&self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => {
                let s = 1.0 / (1.0 + (-z).exp());
                s * (1.0 - s)
            }
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    pub has_bias: bool,
}

/// How biases are initialized and trained. `FixedOne` and `NoBias` are the
/// two ways of making IF / Only-IF training well posed; the choice is
/// recorded in every serialized network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BiasPolicy {
    #[default]
    Trainable,
    NoBias,
    FixedOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    spec: LayerSpec,
    weights: Array2<f64>,
    bias: Array1<f64>,
    mask: Array2<bool>,
}

impl Layer {
    pub fn spec(&self) -> &LayerSpec {
        &self.spec
    }

    pub fn weights(&self) -> ArrayView2<f64> {
        self.weights.view()
    }

    pub fn bias(&self) -> ArrayView1<f64> {
        self.bias.view()
    }

    pub fn mask(&self) -> &Array2<bool> {
        &self.mask
    }

    pub fn unmasked_in_degree(&self, neuron: usize) -> usize {
        self.mask.row(neuron).iter().filter(|&&m| m).count()
    }

    fn apply_mask(&mut self) {
        for ((i, j), &keep) in self.mask.indexed_iter() {
            if !keep {
                self.weights[[i, j]] = 0.0;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
    bias_policy: BiasPolicy,
}

/// On-disk form: versioned, with weights and masks flattened row-major.
#[derive(Debug, Serialize, Deserialize)]
struct NetworkFile {
    format_version: u32,
    bias_policy: BiasPolicy,
    layers: Vec<LayerFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LayerFile {
    spec: LayerSpec,
    weights: Vec<f64>,
    biases: Vec<f64>,
    mask: Vec<bool>,
}

impl Network {
    /// Builds a network with seeded uniform init in +-sqrt(6/(in+out)) and
    /// zero (or policy-fixed) biases.
    pub fn new(specs: &[LayerSpec], seed: u64) -> Result<Self> {
        Network::with_bias_policy(specs, BiasPolicy::Trainable, seed)
    }

    pub fn with_bias_policy(specs: &[LayerSpec], policy: BiasPolicy, seed: u64) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::Config("a network needs at least one layer".into()));
        }
        for pair in specs.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::DimensionMismatch {
                    context: "layer chain",
                    expected: pair[0].out_dim.to_string(),
                    actual: pair[1].in_dim.to_string(),
                });
            }
        }
        if specs.iter().any(|s| s.in_dim == 0 || s.out_dim == 0) {
            return Err(Error::Config("layer dimensions must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = specs
            .iter()
            .map(|&spec| {
                let bound = (6.0 / (spec.in_dim + spec.out_dim) as f64).sqrt();
                let weights = Array2::from_shape_fn((spec.out_dim, spec.in_dim), |_| {
                    rng.random_range(-bound..=bound)
                });
                let spec = LayerSpec {
                    has_bias: spec.has_bias && policy != BiasPolicy::NoBias,
                    ..spec
                };
                let bias_value = match policy {
                    BiasPolicy::FixedOne if spec.has_bias => 1.0,
                    _ => 0.0,
                };
                Layer {
                    spec,
                    weights,
                    bias: Array1::from_elem(spec.out_dim, bias_value),
                    mask: Array2::from_elem((spec.out_dim, spec.in_dim), true),
                }
            })
            .collect();
        Ok(Network {
            layers,
            bias_policy: policy,
        })
    }

    /// Builds a network from explicit weights and biases (masks all-active).
    pub fn from_parts(
        specs: &[LayerSpec],
        weights: Vec<Array2<f64>>,
        biases: Vec<Array1<f64>>,
    ) -> Result<Self> {
        let mut net = Network::new(specs, 0)?;
        if weights.len() != net.layers.len() || biases.len() != net.layers.len() {
            return Err(Error::DimensionMismatch {
                context: "from_parts layer count",
                expected: net.layers.len().to_string(),
                actual: format!("{} weights, {} biases", weights.len(), biases.len()),
            });
        }
        for ((layer, w), b) in net.layers.iter_mut().zip(weights).zip(biases) {
            if w.dim() != layer.weights.dim() || b.len() != layer.bias.len() {
                return Err(Error::DimensionMismatch {
                    context: "from_parts shapes",
                    expected: format!("{:?}", layer.weights.dim()),
                    actual: format!("{:?}", w.dim()),
                });
            }
            layer.weights = w;
            layer.bias = b;
        }
        Ok(net)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn bias_policy(&self) -> BiasPolicy {
        self.bias_policy
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].spec.in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().spec.out_dim
    }

    /// Restricts a layer's mask: entries can only be switched off, never
    /// back on, so masking is monotone across a training run.
    pub fn restrict_mask(&mut self, layer: usize, keep: &Array2<bool>) -> Result<()> {
        let l = self
            .layers
            .get_mut(layer)
            .ok_or_else(|| Error::Config(format!("layer index {layer} out of range")))?;
        if keep.dim() != l.mask.dim() {
            return Err(Error::DimensionMismatch {
                context: "mask shape",
                expected: format!("{:?}", l.mask.dim()),
                actual: format!("{:?}", keep.dim()),
            });
        }
        for (slot, &k) in l.mask.iter_mut().zip(keep.iter()) {
            *slot = *slot && k;
        }
        l.apply_mask();
        Ok(())
    }

    /// Runs the batch through every layer, retaining all pre-activations
    /// and activations for backprop and firing-path extraction.
    pub fn forward(&self, batch: ArrayView2<f64>) -> Result<ForwardPass> {
        if batch.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "forward input",
                expected: self.input_dim().to_string(),
                actual: batch.ncols().to_string(),
            });
        }
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len());
        let mut current = batch.to_owned();
        for layer in &self.layers {
            let z = current.dot(&layer.weights.t()) + &layer.bias;
            let a = z.map(|&v| layer.spec.activation.apply(v));
            pre.push(z);
            post.push(a.clone());
            current = a;
        }
        Ok(ForwardPass {
            input: batch.to_owned(),
            pre,
            post,
        })
    }

    /// Network outputs only.
    pub fn outputs(&self, batch: ArrayView2<f64>) -> Result<Array2<f64>> {
        Ok(self.forward(batch)?.output().to_owned())
    }

    /// Outputs thresholded at 0.5 (a value of exactly 0.5 counts as true).
    pub fn boolean_outputs(&self, batch: ArrayView2<f64>) -> Result<Array2<bool>> {
        Ok(self.outputs(batch)?.map(|&v| v >= 0.5))
    }

    /// Gradient of `sum-loss + l1_weight * ||W||_1` w.r.t. every parameter,
    /// given the gradient of the summed loss at the network output.
    ///
    /// Gradients of masked weights are exactly zero; the L1 subgradient at
    /// w = 0 is taken as 0; bias gradients are zero when the bias is not
    /// trainable under the network's bias policy.
    pub fn backward(
        &self,
        pass: &ForwardPass,
        loss_grad_at_output: ArrayView2<f64>,
        l1_weight: f64,
    ) -> Result<Gradients> {
        self.backward_scoped(pass, loss_grad_at_output, l1_weight, L1Scope::AllLayers)
    }

    /// As `backward`, with the L1 penalty restricted to part of the net.
    pub fn backward_scoped(
        &self,
        pass: &ForwardPass,
        loss_grad_at_output: ArrayView2<f64>,
        l1_weight: f64,
        l1_scope: L1Scope,
    ) -> Result<Gradients> {
        let last = self.layers.len() - 1;
        if loss_grad_at_output.dim() != pass.post[last].dim() {
            return Err(Error::DimensionMismatch {
                context: "backward output gradient",
                expected: format!("{:?}", pass.post[last].dim()),
                actual: format!("{:?}", loss_grad_at_output.dim()),
            });
        }
        let train_bias = self.bias_policy == BiasPolicy::Trainable;
        let mut weight_grads = vec![Array2::zeros((0, 0)); self.layers.len()];
        let mut bias_grads = vec![Array1::zeros(0); self.layers.len()];
        let mut grad_post = loss_grad_at_output.to_owned();

        for idx in (0..self.layers.len()).rev() {
            let layer = &self.layers[idx];
            let d_pre =
                &grad_post * &pass.pre[idx].map(|&z| layer.spec.activation.derivative(z));
            let input = if idx == 0 {
                pass.input.view()
            } else {
                pass.post[idx - 1].view()
            };
            let l1 = match l1_scope {
                L1Scope::AllLayers => l1_weight,
                L1Scope::FirstLayerOnly if idx == 0 => l1_weight,
                L1Scope::FirstLayerOnly => 0.0,
            };
            let mut dw = d_pre.t().dot(&input);
            dw += &layer.weights.map(|&w| l1 * sign(w));
            for ((i, j), &keep) in layer.mask.indexed_iter() {
                if !keep {
                    dw[[i, j]] = 0.0;
                }
            }
            let db = if layer.spec.has_bias && train_bias {
                d_pre.sum_axis(Axis(0))
            } else {
                Array1::zeros(layer.spec.out_dim)
            };
            grad_post = d_pre.dot(&layer.weights);
            weight_grads[idx] = dw;
            bias_grads[idx] = db;
        }
        Ok(Gradients {
            weights: weight_grads,
            biases: bias_grads,
        })
    }

    /// Collapses a ReLU-hidden network into the single affine map that is
    /// active on this sample's firing path: hidden layer k contributes
    /// `D_k W_k` (D the 0/1 diagonal of active units), the output layer its
    /// plain weights, so `output = sigma(W_hat c + b_hat)`.
    pub fn affine_collapse(&self, sample: ArrayView1<f64>) -> Result<AffineCollapse> {
        let hidden = &self.layers[..self.layers.len() - 1];
        if let Some(bad) = hidden
            .iter()
            .find(|l| l.spec.activation != Activation::Relu)
        {
            return Err(Error::UnsupportedArchitecture(format!(
                "affine collapse requires relu hidden activations, found {:?}",
                bad.spec.activation
            )));
        }
        let batch = sample.insert_axis(Axis(0));
        let pass = self.forward(batch)?;

        let k = self.input_dim();
        let mut w_hat = Array2::eye(k);
        let mut b_hat = Array1::zeros(k);
        for (idx, layer) in self.layers.iter().enumerate() {
            // affine map of this layer along the firing path
            let mut w = layer.weights.clone();
            let mut b = layer.bias.clone();
            if idx < self.layers.len() - 1 {
                for (unit, mut row) in w.rows_mut().into_iter().enumerate() {
                    // pre-activation of exactly 0 counts as inactive
                    if pass.pre[idx][[0, unit]] <= 0.0 {
                        row.fill(0.0);
                        b[unit] = 0.0;
                    }
                }
            }
            b_hat = w.dot(&b_hat) + &b;
            w_hat = w.dot(&w_hat);
        }
        Ok(AffineCollapse {
            w_hat,
            b_hat,
            anchor: sample.to_owned(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let file = NetworkFile {
            format_version: NETWORK_FORMAT_VERSION,
            bias_policy: self.bias_policy,
            layers: self
                .layers
                .iter()
                .map(|l| LayerFile {
                    spec: l.spec,
                    weights: l.weights.iter().copied().collect(),
                    biases: l.bias.to_vec(),
                    mask: l.mask.iter().copied().collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(text)?;
        if file.format_version != NETWORK_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported network format version {}",
                file.format_version
            )));
        }
        let mut layers = Vec::with_capacity(file.layers.len());
        for lf in file.layers {
            let shape = (lf.spec.out_dim, lf.spec.in_dim);
            let weights = Array2::from_shape_vec(shape, lf.weights)
                .map_err(|e| Error::Config(format!("bad weight shape: {e}")))?;
            let mask = Array2::from_shape_vec(shape, lf.mask)
                .map_err(|e| Error::Config(format!("bad mask shape: {e}")))?;
            if lf.biases.len() != lf.spec.out_dim {
                return Err(Error::Config("bad bias length".into()));
            }
            layers.push(Layer {
                spec: lf.spec,
                weights,
                bias: Array1::from_vec(lf.biases),
                mask,
            });
        }
        if layers.is_empty() {
            return Err(Error::Config("network file has no layers".into()));
        }
        let mut net = Network {
            layers,
            bias_policy: file.bias_policy,
        };
        for layer in &mut net.layers {
            layer.apply_mask();
        }
        Ok(net)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Network::from_json(&std::fs::read_to_string(path)?)
    }
}

fn sign(w: f64) -> f64 {
    if w > 0.0 {
        1.0
    } else if w < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// All intermediate state of one forward run.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub input: Array2<f64>,
    pub pre: Vec<Array2<f64>>,
    pub post: Vec<Array2<f64>>,
}

impl ForwardPass {
    pub fn output(&self) -> &Array2<f64> {
        self.post.last().expect("networks have at least one layer")
    }
}

#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

/// Per-sample affine reduction `sigma(W_hat c + b_hat)` of a ReLU network.
#[derive(Debug, Clone)]
pub struct AffineCollapse {
    pub w_hat: Array2<f64>,
    pub b_hat: Array1<f64>,
    pub anchor: Array1<f64>,
}

/// Which layers the L1 penalty touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum L1Scope {
    #[default]
    AllLayers,
    FirstLayerOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l1_weight: f64,
    pub l1_scope: L1Scope,
    pub optimizer: Optimizer,
    /// None = full batch.
    pub batch_size: Option<usize>,
    pub seed: u64,
    /// Epoch after which the pruning hook fires (1-based).
    pub prune_epoch: usize,
    /// Keep training after the pruning hook; otherwise stop there.
    pub fine_tune: bool,
}

impl TrainConfig {
    /// Defaults: Adam, lr 1e-2, no L1, full batch, prune at half time,
    /// fine-tuning on.
    pub fn new(epochs: usize) -> Self {
        TrainConfig {
            epochs,
            learning_rate: 1e-2,
            l1_weight: 0.0,
            l1_scope: L1Scope::AllLayers,
            optimizer: Optimizer::adam(),
            batch_size: None,
            seed: 0,
            prune_epoch: (epochs / 2).max(1),
            fine_tune: true,
        }
    }

    fn validate(&self, has_pruner: bool) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.l1_weight < 0.0 {
            return Err(Error::Config("l1 weight must be nonnegative".into()));
        }
        if has_pruner && self.epochs > 0 && !(1..=self.epochs).contains(&self.prune_epoch) {
            return Err(Error::Config(format!(
                "prune_epoch must satisfy 1 <= prune_epoch <= epochs (got {})",
                self.prune_epoch
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean (per-sample) loss.
    pub loss: f64,
    /// Exact-match fraction of thresholded outputs, when targets exist.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
}

impl TrainHistory {
    pub fn final_loss(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.loss)
    }
}

struct AdamState {
    m_w: Vec<Array2<f64>>,
    v_w: Vec<Array2<f64>>,
    m_b: Vec<Array1<f64>>,
    v_b: Vec<Array1<f64>>,
    t: u64,
}

/// Trains in place. The criterion sees the batch-summed loss; the update
/// uses the per-sample mean so learning rates transfer across batch sizes.
/// `pruner` fires once, after epoch `config.prune_epoch` completes; with
/// `fine_tune` off training stops right there. Non-finite losses abort
/// with the offending epoch and layer.
pub fn train(
    net: &mut Network,
    inputs: ArrayView2<f64>,
    targets: Option<ArrayView2<f64>>,
    criterion: &Criterion,
    config: &TrainConfig,
    mut pruner: Option<&mut dyn FnMut(&mut Network) -> Result<()>>,
) -> Result<TrainHistory> {
    config.validate(pruner.is_some())?;
    let n = inputs.nrows();
    if n == 0 {
        return Err(Error::Data {
            row: 0,
            column: "-".into(),
            message: "cannot train on an empty dataset".into(),
        });
    }

    let mut history = TrainHistory::default();
    // epoch-0 entry: state before any update
    let pass = net.forward(inputs)?;
    let (loss0, _) = criterion.loss_and_grad(pass.output().view(), targets)?;
    history.epochs.push(EpochStats {
        epoch: 0,
        loss: loss0 / n as f64,
        accuracy: accuracy_of(pass.output(), targets),
    });

    let mut adam = AdamState {
        m_w: net
            .layers
            .iter()
            .map(|l| Array2::zeros(l.weights.dim()))
            .collect(),
        v_w: net
            .layers
            .iter()
            .map(|l| Array2::zeros(l.weights.dim()))
            .collect(),
        m_b: net
            .layers
            .iter()
            .map(|l| Array1::zeros(l.bias.len()))
            .collect(),
        v_b: net
            .layers
            .iter()
            .map(|l| Array1::zeros(l.bias.len()))
            .collect(),
        t: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    for epoch in 1..=config.epochs {
        let batches: Vec<Vec<usize>> = match config.batch_size {
            None => vec![(0..n).collect()],
            Some(size) => {
                let size = size.max(1);
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                order.chunks(size).map(|c| c.to_vec()).collect()
            }
        };

        for batch_indices in &batches {
            let batch_x = inputs.select(Axis(0), batch_indices);
            let batch_y = targets.map(|t| t.select(Axis(0), batch_indices));
            let pass = net.forward(batch_x.view())?;
            let (_, grad_out) =
                criterion.loss_and_grad(pass.output().view(), batch_y.as_ref().map(|t| t.view()))?;
            // per-sample mean of the data term; L1 enters at its stated weight
            let grad_out = grad_out / batch_indices.len() as f64;
            let grads =
                net.backward_scoped(&pass, grad_out.view(), config.l1_weight, config.l1_scope)?;
            apply_update(net, &grads, config, &mut adam);
        }

        // epoch-level loss on the full dataset
        let pass = net.forward(inputs)?;
        let (loss_sum, _) = criterion.loss_and_grad(pass.output().view(), targets)?;
        let mean_loss = loss_sum / n as f64;
        let bad_layer = first_nonfinite_layer(&pass);
        if !mean_loss.is_finite() || bad_layer.is_some() {
            return Err(Error::Numeric {
                epoch,
                layer: bad_layer.unwrap_or(net.layers.len() - 1),
                message: format!("loss became {mean_loss}"),
            });
        }
        history.epochs.push(EpochStats {
            epoch,
            loss: mean_loss,
            accuracy: accuracy_of(pass.output(), targets),
        });

        if epoch == config.prune_epoch {
            if let Some(hook) = pruner.as_mut() {
                hook(net)?;
                if !config.fine_tune {
                    break;
                }
            }
        }
    }
    Ok(history)
}

fn accuracy_of(outputs: &Array2<f64>, targets: Option<ArrayView2<f64>>) -> Option<f64> {
    targets.map(|t| {
        let total = t.len().max(1);
        let hits = outputs
            .iter()
            .zip(t.iter())
            .filter(|(&f, &y)| (f >= 0.5) == (y >= 0.5))
            .count();
        hits as f64 / total as f64
    })
}

fn first_nonfinite_layer(pass: &ForwardPass) -> Option<usize> {
    pass.pre
        .iter()
        .position(|z| z.iter().any(|v| !v.is_finite()))
}

fn apply_update(net: &mut Network, grads: &Gradients, config: &TrainConfig, adam: &mut AdamState) {
    let lr = config.learning_rate;
    match config.optimizer {
        Optimizer::Sgd => {
            for (idx, layer) in net.layers.iter_mut().enumerate() {
                layer.weights -= &(lr * &grads.weights[idx]);
                layer.bias -= &(lr * &grads.biases[idx]);
                layer.apply_mask();
            }
        }
        Optimizer::Adam {
            beta1,
            beta2,
            epsilon,
        } => {
            adam.t += 1;
            let bc1 = 1.0 - beta1.powi(adam.t as i32);
            let bc2 = 1.0 - beta2.powi(adam.t as i32);
            for (idx, layer) in net.layers.iter_mut().enumerate() {
                let gw = &grads.weights[idx];
                adam.m_w[idx] = beta1 * &adam.m_w[idx] + (1.0 - beta1) * gw;
                adam.v_w[idx] = beta2 * &adam.v_w[idx] + (1.0 - beta2) * &(gw * gw);
                let update = adam.m_w[idx].map(|m| m / bc1)
                    / (adam.v_w[idx].map(|v| (v / bc2).sqrt()) + epsilon);
                layer.weights -= &(lr * &update);

                let gb = &grads.biases[idx];
                adam.m_b[idx] = beta1 * &adam.m_b[idx] + (1.0 - beta1) * gb;
                adam.v_b[idx] = beta2 * &adam.v_b[idx] + (1.0 - beta2) * &(gb * gb);
                let update = adam.m_b[idx].map(|m| m / bc1)
                    / (adam.v_b[idx].map(|v| (v / bc2).sqrt()) + epsilon);
                layer.bias -= &(lr * &update);

                layer.apply_mask();
            }
        }
    }
}
